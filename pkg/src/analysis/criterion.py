"""
Finite-coordinate continuity criterion.

f is continuous at a exactly when for every eps there are a finite index set
T0 and a box U around a with |f(a) - f(x_{T0}^a)| < eps for all x in U. The
search below tries boxes from the whole space down the radius grid and, for
each box, index sets T0 of {1..N} by increasing size. NOT_FOUND only means
the budget (N, grid, samples) was exhausted.
"""
from itertools import combinations
from typing import List, Optional, Sequence

import numpy as np

from src.analysis.reports import CriterionResult
from src.analysis.sampling import NetSpec, sample_box
from src.constructions.functions import ConstructedFunction
from src.sigma.space import BoxNeighborhood, SparsePoint, random_unit_vector
from src.sigma.verdicts import Status
from src.utils.config_loader import default
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


def _witness_box(box: BoxNeighborhood, horizon: int) -> BoxNeighborhood:
    """Sub-box of `box` that also constrains 1..horizon; its witnesses lie in `box`."""
    constraints = dict(box.constraints)
    for i in range(1, horizon + 1):
        constraints.setdefault(i, 1.0)
    return BoxNeighborhood(box.center, constraints)


def _axis_moves(f: ConstructedFunction, a: SparsePoint, box: BoxNeighborhood, horizon: int,
                rng: np.random.Generator, magnitudes: Sequence[float]) -> List[SparsePoint]:
    """Moves of `a` along one coordinate, for every index 1..horizon and probe magnitude, kept inside `box`."""
    space = f.space
    top = max(magnitudes)
    moves = []
    for t in range(1, horizon + 1):
        coord_space = space.family.space(t)
        r = box.radius(t)
        for mag in magnitudes:
            e = random_unit_vector(coord_space, rng)
            if r is None:
                for origin, scale in f.probe_frames(t):
                    if origin is None:
                        origin = space.coordinate(a, t)
                    moves.append(space.with_coordinate(a, t, np.asarray(origin) + mag * scale * e))
            else:
                c = np.asarray(space.coordinate(box.center, t))
                moves.append(space.with_coordinate(a, t, c + 0.99 * (mag / top) * r * e))
    return [x for x in moves if space.box_contains(box, x)]


def _box_points(f: ConstructedFunction, a: SparsePoint, box: BoxNeighborhood, horizon: int,
                rng: np.random.Generator, samples: int, net: NetSpec) -> List[SparsePoint]:
    space = f.space
    points = [x for x in f.witnesses(a, _witness_box(box, horizon)) if space.box_contains(box, x)]
    points += _axis_moves(f, a, box, horizon, rng, net.probe_magnitudes)
    points += sample_box(space, f, a, box, rng, samples, net.probe_magnitudes,
                         net.unconstrained_spread, beyond=horizon)
    return points


def criterion_check_3_9(f: ConstructedFunction, a: SparsePoint, eps: float, horizon: Optional[int] = None,
                        box_radii: Optional[Sequence[float]] = None, samples: Optional[int] = None,
                        seed: Optional[int] = None,
                        candidate_boxes: Sequence[BoxNeighborhood] = ()) -> CriterionResult:
    """
    Search (T0, U) with sup over sampled x in U of |f(a) - f(x_{T0}^a)| < eps.

    Grid boxes constrain indices 1..N with one radius; candidate boxes (for
    instance continuity boxes built for a) are tried after the grid.
    """
    N = horizon or default("criterion.horizon", 8)
    radii = list(box_radii or [float(r) for r in default("criterion.box_radii",
                                                         [float("inf"), 1.0, 0.1, 0.01, 0.001])])
    samples = samples or default("criterion.samples", 32)
    net = NetSpec.from_config()
    rng = np.random.default_rng(net.seed if seed is None else seed)
    space = f.space
    fa = f.evaluate(a)

    boxes = [BoxNeighborhood.around(a, r, N) for r in sorted(radii, reverse=True)] + list(candidate_boxes)
    subsets = [T0 for size in range(N + 1) for T0 in combinations(range(1, N + 1), size)]
    tried = 0
    for box in boxes:
        points = _box_points(f, a, box, N, rng, samples, net)
        for T0 in subsets:
            tried += 1
            worst = 0.0
            for x in points:
                worst = max(worst, abs(fa - f.evaluate(space.splice(x, T0, a))))
                if worst >= eps:
                    break
            if worst < eps:
                return CriterionResult(Status.FOUND, tuple(T0), box, worst,
                                       {"N": N, "grid": radii, "samples": samples}, tried)
    logger.warning(f"{f.name}: no (T0, U) within budget N={N}, {len(boxes)} boxes")
    return CriterionResult(Status.NOT_FOUND, None, None, None,
                           {"N": N, "grid": radii, "samples": samples}, tried)
