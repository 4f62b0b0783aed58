"""
Brute-force grid oracles on finite products Y_n = X_1 x ... x X_n.

They trade speed for transparency and are used to cross-check the closed
forms: the distance to the escape region's complement, the distance to a
unit sphere, radius-extension margins and oscillations of functions that
factor through finitely many coordinates.
"""
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from src.sigma.errors import InfeasibleGridError, PreconditionError
from src.sigma.space import CoordSpace, NormKind, SpaceFamily
from src.sigma.traces import TraceFamily, block_offsets, flatten
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

BatchPredicate = Callable[[np.ndarray], np.ndarray]
BatchFunction = Callable[[np.ndarray], np.ndarray]


def d_n_batch(family: SpaceFamily, n: int, u: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """d_n(u, z) for every row z of a flat (m, dim(Y_n)) array."""
    offsets = block_offsets(family, n)
    dist = np.zeros(Z.shape[0])
    for i, space in enumerate(family.spaces(n)):
        block = Z[:, offsets[i]:offsets[i + 1]] - u[offsets[i]:offsets[i + 1]]
        dist = np.maximum(dist, space.batch_norm(block))
    return dist


def escape_region_complement(family: SpaceFamily, n: int) -> BatchPredicate:
    """Y_n minus A_n, where A_n = {||y_i|| < 1 for i < n, ||y_n|| >= 1}."""
    offsets = block_offsets(family, n)
    spaces = family.spaces(n)

    def predicate(Z: np.ndarray) -> np.ndarray:
        inside = np.ones(Z.shape[0], dtype=bool)
        for i, space in enumerate(spaces):
            norms = space.batch_norm(Z[:, offsets[i]:offsets[i + 1]])
            inside &= (norms >= 1.0) if i == n - 1 else (norms < 1.0)
        return ~inside

    return predicate


def trace_complement(traces: TraceFamily, n: int) -> BatchPredicate:
    """Y_n minus the trace W_{1..n}."""
    return lambda Z: ~traces.contains_batch(n, Z)


def _axis(lo: float, hi: float, step: float, center: float, half: float) -> np.ndarray:
    k0 = max(int(np.ceil((center - half - lo) / step - 1e-9)), 0)
    k1 = min(int(np.floor((center + half - lo) / step + 1e-9)), int(np.floor((hi - lo) / step + 1e-9)))
    return lo + step * np.arange(k0, k1 + 1) if k1 >= k0 else np.zeros(0)


_CHUNK_ROWS = 1_000_000


def _window_chunks(axes):
    """Grid points of the product of axes, in blocks split along the first axis."""
    if not all(ax.size for ax in axes):
        return
    total = int(np.prod([ax.size for ax in axes]))
    if total <= _CHUNK_ROWS or len(axes) == 1:
        yield np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
        return
    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, len(axes) - 1)
    for v in axes[0]:
        yield np.hstack([np.full((rest.shape[0], 1), v), rest])


def brute_force_set_distance(family: SpaceFamily, n: int, u: Sequence[Sequence[float]],
                             predicate: BatchPredicate, grid_box: Tuple[float, float] = (-3.0, 3.0),
                             step: float = 0.01, initial_half: Optional[float] = None) -> float:
    """
    min d_n(u, y) over grid points y of the cube grid_box^dim(Y_n) with
    predicate(y) true.

    Windows of growing half-width around u are scanned; since d_n dominates
    the flat max-distance for every supported norm, the first window whose
    best feasible point lies within its half-width holds the global minimum.
    """
    lo, hi = grid_box
    if not (hi > lo and step > 0):
        raise PreconditionError("Grid box must be nonempty and the step positive")
    flat_u = flatten(u)
    half = initial_half or 4 * step
    full = max(np.max(np.abs(flat_u - lo)), np.max(np.abs(flat_u - hi))) + step
    while True:
        axes = [_axis(lo, hi, step, c, half) for c in flat_u]
        best = np.inf
        for Z in _window_chunks(axes):
            mask = predicate(Z)
            if np.any(mask):
                best = min(best, float(np.min(d_n_batch(family, n, flat_u, Z[mask]))))
        if best <= half or half >= full:
            break
        half *= 2
    if not np.isfinite(best):
        raise InfeasibleGridError(f"No grid point of the box satisfies the predicate (step {step})")
    return best


@lru_cache(maxsize=32)
def _sphere_sample(dim: int, norm_kind: NormKind, count: int) -> Tuple[np.ndarray, float]:
    """Points on the unit sphere of the norm and a resolution estimate (largest nearest-neighbour gap)."""
    if dim > 3:
        raise PreconditionError("Sphere sampling is implemented for dimensions 1 to 3")
    space = CoordSpace(dim, norm_kind)
    if dim == 1:
        return np.array([[-1.0], [1.0]]), 0.0
    if dim == 2:
        angles = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        raw = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    else:
        # Fibonacci lattice on S^2.
        i = np.arange(count) + 0.5
        phi = np.arccos(1 - 2 * i / count)
        theta = np.pi * (1 + 5 ** 0.5) * i
        raw = np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], axis=1)
    points = raw / space.batch_norm(raw)[:, None]
    gaps = np.full(points.shape[0], np.inf)
    for j in range(0, points.shape[0], 512):
        block = points[j:j + 512]
        d = space.batch_norm(block[:, None, :] - points[None, :, :])
        d[np.arange(block.shape[0]), np.arange(j, j + block.shape[0])] = np.inf
        gaps[j:j + 512] = d.min(axis=1)
    return points, float(gaps.max())


def brute_force_sphere_distance(space: CoordSpace, v: Sequence[float], count: int = 2000) -> Tuple[float, float]:
    """
    Distance from v to the unit sphere by minimising over a dense sphere
    sample. Returns (distance, sample resolution).
    """
    d, resolution = brute_force_sphere_distances(space, np.asarray(space.check(v))[None, :], count)
    return float(d[0]), resolution


def brute_force_sphere_distances(space: CoordSpace, V: np.ndarray, count: int = 2000,
                                 chunk: int = 256) -> Tuple[np.ndarray, float]:
    """The sphere-sample distance for every row of an (m, dim) array."""
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[1] != space.dim:
        raise PreconditionError(f"Expected rows of length {space.dim}, got shape {V.shape}")
    points, resolution = _sphere_sample(space.dim, space.norm_kind, count)
    out = np.empty(V.shape[0])
    for j in range(0, V.shape[0], chunk):
        block = V[j:j + chunk]
        out[j:j + chunk] = space.batch_norm(points[None, :, :] - block[:, None, :]).min(axis=1)
    return out, resolution


def brute_force_oscillation(family: SpaceFamily, n: int, fn: BatchFunction, u: Sequence[Sequence[float]],
                            radii: Sequence[Optional[float]], step: float = 0.01,
                            extent: float = 3.0) -> float:
    """
    max - min of fn over grid points of the box around u in Y_n.

    radii[i] is the open-ball radius at coordinate i+1; None leaves the
    coordinate free over [u_i - extent, u_i + extent]. fn maps a flat (m, dim)
    array to m values.
    """
    flat_u = flatten(u)
    offsets = block_offsets(family, n)
    axes = []
    for i, space in enumerate(family.spaces(n)):
        r = radii[i] if i < len(radii) else None
        half = extent if r is None else r
        for j in range(offsets[i], offsets[i + 1]):
            k = int(np.floor(half / step + 1e-9))
            axes.append(flat_u[j] + step * np.arange(-k, k + 1))
    Z = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, flat_u.size)
    keep = np.ones(Z.shape[0], dtype=bool)
    for i, space in enumerate(family.spaces(n)):
        r = radii[i] if i < len(radii) else None
        if r is not None:
            keep &= space.batch_norm(Z[:, offsets[i]:offsets[i + 1]] - flat_u[offsets[i]:offsets[i + 1]]) < r
    values = np.asarray(fn(Z[keep]), dtype=float)
    if values.size == 0:
        return 0.0
    return float(values.max() - values.min())
