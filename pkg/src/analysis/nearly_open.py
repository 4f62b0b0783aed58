"""
Nearly-open checks: every finite-coordinate trace W_{1..n} of W must be open
in Y_n.
"""
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from src.analysis.reports import NearlyOpenReport, TraceVerdict
from src.sigma.errors import PreconditionError
from src.sigma.traces import TraceCell, TraceFamily, TracePoint, flatten, unflatten
from src.sigma.verdicts import Certainty, Status
from src.utils.config_loader import default
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


class TraceMode(str, Enum):
    ANALYTIC = "ANALYTIC"
    GRID = "GRID"


def _uncovered(cell: TraceCell, open_cells: List[TraceCell], traces: TraceFamily) -> Optional[TracePoint]:
    """A point of a closed cell's boundary that no open cell covers, if any."""
    for z in cell.boundary_points(traces.family):
        if not any(other.contains(traces.family, z) for other in open_cells):
            return z
    return None


def _analytic_verdict(traces: TraceFamily, n: int) -> TraceVerdict:
    cells = traces.cells(n)
    open_cells = [c for c in cells if c.is_open]
    for cell in cells:
        if cell.is_open or any(cell.contained_in(o, traces.family) for o in open_cells):
            continue
        z = _uncovered(cell, open_cells, traces)
        if z is not None:
            return TraceVerdict(n, Status.NOT_OPEN, Certainty.CERTIFIED, z,
                                f"boundary point of a closed cell at n={n}")
        return TraceVerdict(n, Status.NOT_OPEN, Certainty.EVIDENCE, None,
                            f"closed cell not inside an open cell at n={n}")
    return TraceVerdict(n, Status.PASS, Certainty.CERTIFIED, None, f"{len(cells)} open cells")


def _probe_directions(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    axes = np.vstack([np.eye(dim), -np.eye(dim)])
    random = rng.standard_normal((count, dim))
    random /= np.max(np.abs(random), axis=1, keepdims=True)
    return np.vstack([axes, random])


def _fits(traces: TraceFamily, n: int, flat: np.ndarray, radius: float, widest: int,
          directions: np.ndarray) -> bool:
    # Probe offsets have max-entry 1; scaling by the widest block keeps every block norm within radius.
    return bool(np.all(traces.contains_batch(n, flat + radius / widest * directions)))


def _grid_verdict(traces: TraceFamily, n: int, step: float, directions: np.ndarray,
                  suspects: Sequence[TracePoint]) -> TraceVerdict:
    """
    Every suspect point inside the trace needs a small ball inside it. The
    radius starts at step/2 and is halved `refinements` times before a point
    counts as a boundary point, so interior points close to the edge pass.
    """
    widest = max(space.dim for space in traces.family.spaces(n))
    refinements = int(default("nearly_open.refinements", 20))
    checked = 0
    for z in suspects:
        if not traces.contains(n, z):
            continue
        checked += 1
        flat = flatten(z)
        radii = 0.5 * step * 0.5 ** np.arange(refinements + 1)
        if not any(_fits(traces, n, flat, r, widest, directions) for r in radii):
            return TraceVerdict(n, Status.NOT_OPEN, Certainty.EVIDENCE, tuple(tuple(v) for v in z),
                                f"no ball of radius {radii[-1]:g} inside the trace at n={n}")
    if checked == 0 and not traces.analytic:
        return TraceVerdict(n, Status.INCONCLUSIVE, Certainty.EVIDENCE, None,
                            f"no suspect point inside the trace at n={n}")
    return TraceVerdict(n, Status.PASS, Certainty.EVIDENCE, None, f"{checked} suspect points open")


def _black_box_suspects(traces: TraceFamily, n: int, rng: np.random.Generator) -> List[TracePoint]:
    """A lattice around the anchor (when small enough) and uniform draws from the same cube."""
    center = np.concatenate([np.asarray(traces.space.anchor_value(traces.anchor_id, i), dtype=float)
                             for i in range(1, n + 1)])
    dim = center.size
    span = float(default("nearly_open.span", 2.0))
    ticks = np.linspace(-span, span, int(default("nearly_open.lattice_ticks", 9)))
    blocks = []
    if len(ticks) ** dim <= int(default("nearly_open.lattice_max", 4096)):
        lattice = np.stack(np.meshgrid(*([ticks] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
        blocks.append(center + lattice)
    draws = int(default("nearly_open.random_suspects", 64))
    blocks.append(center + rng.uniform(-span, span, (draws, dim)))
    return [unflatten(traces.family, n, row) for row in np.vstack(blocks)]


def _suspects(traces: TraceFamily, n: int, step: float, extra: Sequence[TracePoint],
              rng: np.random.Generator) -> List[TracePoint]:
    points = list(extra)
    if traces.analytic:
        for cell in traces.cells(n):
            points.extend(cell.boundary_points(traces.family))
            points.extend(cell.interior_points(traces.family, step))
    else:
        points.extend(_black_box_suspects(traces, n, rng))
    return points


def nearly_open_trace_check(traces: TraceFamily, horizon: int, mode: TraceMode = TraceMode.ANALYTIC,
                            step: Optional[float] = None, sample: Sequence[Sequence[float]] = (),
                            seed: int = 0) -> NearlyOpenReport:
    """
    Openness verdict for the traces W_{1..n}, n = 1..horizon.

    ANALYTIC certifies unions of open cells and rejects closed cells that no
    open cell absorbs. GRID looks for a small ball inside the trace around
    suspect points: cell boundaries and points just inside each cell for
    analytic traces, a seeded lattice and uniform draws around the anchor for
    black-box traces, and flat points of Y_n passed in `sample`. A black-box
    trace none of whose suspects lies inside it is INCONCLUSIVE at that n.
    """
    mode = TraceMode(mode)
    verdicts = []
    if mode == TraceMode.ANALYTIC:
        if not traces.analytic:
            raise PreconditionError("Analytic mode needs an analytic trace description")
        for n in range(1, horizon + 1):
            verdicts.append(_analytic_verdict(traces, n))
    else:
        step = step or default("nearly_open.grid_step", 1e-3)
        rng = np.random.default_rng(seed)
        count = default("nearly_open.directions", 16)
        for n in range(1, horizon + 1):
            dim = sum(space.dim for space in traces.family.spaces(n))
            extra = [unflatten(traces.family, n, np.asarray(s, dtype=float)) for s in sample if len(s) == dim]
            verdicts.append(_grid_verdict(traces, n, step, _probe_directions(dim, count, rng),
                                          _suspects(traces, n, step, extra, rng)))
    report = NearlyOpenReport(mode.value, verdicts)
    failure = report.first_failure
    if failure is not None:
        logger.debug(f"{traces!r}: not open at n={failure.n}")
    return report
