"""
Radius extension for nearly open sets.

Given the open traces G_n of a set W inside sigma(a) and a point x of W whose
support lies in {1..N}, pick radii r_1..r_M so that every closed product
F_j = prod_{k <= N+j-1} B[x_k, r_k] (times the anchor's coordinates beyond)
stays inside the trace G_{N+j-1}. Each new radius is half the available
margin, capped by the previous radius.
"""
from typing import List, Optional

import numpy as np

from src.sigma.errors import AnchorMismatchError, NotNearlyOpenError, PreconditionError
from src.sigma.space import SparsePoint
from src.sigma.traces import TraceFamily
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


def _best_margin(traces: TraceFamily, n: int, centers, radii) -> float:
    """Largest single-cell margin of the closed product inside the trace at n."""
    cells = traces.cells(n)
    if not cells:
        return -np.inf
    return max(cell.margin(traces.family, centers, radii) for cell in cells)


def radii_extension(traces: TraceFamily, x: SparsePoint, horizon: int,
                    support_bound: Optional[int] = None) -> List[float]:
    """
    Radii r_1..r_horizon around x under the half-margin rule.

    Args:
        traces: Analytic traces of W over x's anchor.
        x: A point of W.
        horizon: Number of radii to produce (M >= N).
        support_bound: N; defaults to the largest support index of x (at least 1).

    Raises:
        NotNearlyOpenError: If some stage has no positive margin.
    """
    if not traces.analytic:
        raise PreconditionError("Radius extension needs an analytic trace description")
    if x.anchor_id != traces.anchor_id:
        raise AnchorMismatchError(f"Point over {x.anchor_id!r}, traces over {traces.anchor_id!r}")
    N = support_bound or max(x.max_index, 1)
    if N < x.max_index:
        raise PreconditionError(f"Support of x reaches index {x.max_index} beyond N={N}")
    if horizon < N:
        raise PreconditionError(f"Horizon {horizon} is below N={N}")

    space = traces.space
    centers = [space.coordinate(x, k) for k in range(1, horizon + 1)]

    margin = _best_margin(traces, N, centers[:N], [0.0] * N)
    if not margin > 0.0:
        raise NotNearlyOpenError(f"Trace at n={N} has no room around x (margin {margin:g})", stage=0)
    radii = [0.5 * min(margin, 1.0)] * N
    logger.debug(f"Radii stage 0: margin {margin:g}, r_1..r_{N} = {radii[0]:g}")

    for n in range(N + 1, horizon + 1):
        margin = _best_margin(traces, n, centers[:n], radii + [0.0])
        if not margin > 0.0:
            raise NotNearlyOpenError(
                f"Closed product does not fit the trace at n={n} (margin {margin:g})", stage=n - N)
        radii.append(0.5 * min(margin, radii[-1]))
    return radii
