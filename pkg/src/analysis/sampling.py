"""
Seeded samplers: random sparse points, ball products and unions, points of
boxes and nets of shrinking boxes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.constructions.ball_product import BallProduct, NearlyOpenUnion, Radii
from src.constructions.functions import ConstructedFunction, Thm52Function, classify_region
from src.sigma.errors import SigmaError
from src.sigma.space import ZERO_ANCHOR, BoxNeighborhood, SigmaSpace, SparsePoint, random_unit_vector
from src.utils.config_loader import default


@dataclass(frozen=True)
class NetSpec:
    """
    Finite stand-in for a net converging to a point: level j is the box of
    radius initial_radius * shrink**j on indices 1..j + horizon_offset.
    """
    levels: int = 6
    shrink: float = 0.25
    initial_radius: float = 1.0
    horizon_offset: int = 2
    samples: int = 64
    unconstrained_spread: int = 8
    probe_magnitudes: Tuple[float, ...] = (0.95, 1.0, 1.05, 1.5, 2.05)
    seed: int = 20240531

    def __post_init__(self):
        object.__setattr__(self, "probe_magnitudes", tuple(float(m) for m in self.probe_magnitudes))
        if not 0.0 < self.shrink < 1.0:
            raise ValueError(f"Shrink factor must lie in (0, 1), got {self.shrink}")
        if min(self.levels, self.samples, self.unconstrained_spread) < 1 or self.horizon_offset < 0:
            raise ValueError("Net counts must be at least 1")
        if not self.initial_radius > 0.0:
            raise ValueError("Initial radius must be positive")

    @classmethod
    def from_config(cls, seed: Optional[int] = None, **overrides) -> "NetSpec":
        """Net with the defaults of config/settings.yaml; keyword overrides win."""
        values = dict(
            levels=default("net.levels", 6),
            shrink=default("net.shrink", 0.25),
            initial_radius=default("net.initial_radius", 1.0),
            horizon_offset=default("net.horizon_offset", 2),
            samples=default("net.samples", 64),
            unconstrained_spread=default("net.unconstrained_spread", 8),
            probe_magnitudes=tuple(default("net.probe_magnitudes", [0.95, 1.0, 1.05, 1.5, 2.05])),
        )
        if seed is not None:
            values["seed"] = seed
        values.update(overrides)
        return cls(**values)

    def radius(self, level: int) -> float:
        return self.initial_radius * self.shrink ** level

    def horizon(self, level: int) -> int:
        return level + self.horizon_offset

    def box(self, center: SparsePoint, level: int, extra: Sequence[int] = ()) -> BoxNeighborhood:
        return BoxNeighborhood.around(center, self.radius(level), self.horizon(level), extra)


# Random structures

def random_vector(space: SigmaSpace, n: int, rng: np.random.Generator, scale: float) -> np.ndarray:
    coord_space = space.family.space(n)
    return rng.uniform(0.0, scale) * random_unit_vector(coord_space, rng)


def random_point(space: SigmaSpace, anchor_id: str, rng: np.random.Generator,
                 max_index: int = 4, scale: float = 2.0, density: float = 0.6) -> SparsePoint:
    """Point of sigma(anchor) with random coordinates on a random subset of 1..max_index."""
    overrides = {n: random_vector(space, n, rng, scale)
                 for n in range(1, max_index + 1) if rng.uniform() < density}
    return space.point(anchor_id, overrides)


def random_ball_product(space: SigmaSpace, rng: np.random.Generator, anchor_id: str = ZERO_ANCHOR,
                        max_support: int = 3, radius_range: Tuple[float, float] = (0.5, 2.0),
                        center_scale: float = 1.0) -> BallProduct:
    """Ball product with a random center and a random radius prefix of length max_support."""
    center = random_point(space, anchor_id, rng, max_support, center_scale)
    prefix = tuple(rng.uniform(*radius_range) for _ in range(max_support))
    return BallProduct(center, Radii(prefix, rng.uniform(*radius_range)))


def random_union(space: SigmaSpace, rng: np.random.Generator, members: int,
                 anchor_id: str = ZERO_ANCHOR, **kwargs) -> NearlyOpenUnion:
    return NearlyOpenUnion(tuple(random_ball_product(space, rng, anchor_id, **kwargs) for _ in range(members)))


def sample_in_ball_product(space: SigmaSpace, bp: BallProduct, rng: np.random.Generator,
                           max_index: int = 4, fill: float = 0.99) -> SparsePoint:
    """Point of W: coordinates 1..max(max_index, support of w) drawn inside their balls."""
    top = max(max_index, bp.center.max_index)
    overrides = {}
    for n in range(1, top + 1):
        c = np.asarray(space.coordinate(bp.center, n))
        overrides[n] = c + rng.uniform(0.0, fill) * bp.radii(n) * random_unit_vector(space.family.space(n), rng)
    return space.point(bp.anchor_id, overrides)


def escape_gap(f: Thm52Function, u: SparsePoint) -> float:
    """
    How far u sits from the boundary of its escape region: min of ||z_n|| - 1
    and 1 - ||z_i|| (i < n) for z = h(u) escaping at n; 0 inside W'.
    """
    z = f.h(u)
    region = classify_region(f.space, z)
    if region.inside:
        return 0.0
    n = region.escape
    gap = f.space.family.space(n).norm(f.space.coordinate(z, n)) - 1.0
    for i, v in z.overrides:
        if i >= n:
            break
        gap = min(gap, 1.0 - f.space.family.space(i).norm(v))
    return gap


def sample_stable_escape(space: SigmaSpace, parts: Sequence[Thm52Function], rng: np.random.Generator,
                         gap: float = 0.2, max_index: int = 3, scale: float = 3.0,
                         attempts: int = 10000) -> SparsePoint:
    """
    A point outside the closure of every part, at least `gap` away from the
    boundary of its escape region in transformed coordinates.
    """
    anchor_id = parts[0].anchor_id
    for _ in range(attempts):
        u = random_point(space, anchor_id, rng, max_index, scale)
        if all(escape_gap(f, u) >= gap for f in parts):
            return u
    raise SigmaError(f"No stable escape point found in {attempts} attempts")


def sample_box(space: SigmaSpace, f: Optional[ConstructedFunction], u: SparsePoint, box: BoxNeighborhood,
               rng: np.random.Generator, count: int, magnitudes: Sequence[float],
               spread: int = 8, beyond: int = 0, max_free: int = 3) -> List[SparsePoint]:
    """
    Points of the box around u.

    Constrained coordinates are drawn strictly inside their balls. A few free
    coordinates (unconstrained indices up to max(horizon, beyond) + spread)
    are moved to origin + magnitude * scale * e using the function's probe
    frames.
    """
    top = max(box.horizon, beyond) + spread
    free = [t for t in range(1, top + 1) if box.radius(t) is None]
    base = u.as_dict()
    out = []
    for _ in range(count):
        overrides = dict(base)
        for i, r in box.constraints:
            c = np.asarray(space.coordinate(box.center, i))
            overrides[i] = c + rng.uniform(0.0, 1.0) * r * random_unit_vector(space.family.space(i), rng)
        k = int(rng.integers(0, min(max_free, len(free)) + 1)) if free else 0
        for t in (rng.choice(free, size=k, replace=False) if k else ()):
            t = int(t)
            frames = f.probe_frames(t) if f is not None else [(None, 1.0)]
            origin, scale = frames[int(rng.integers(0, len(frames)))]
            if origin is None:
                origin = space.coordinate(u, t)
            mag = magnitudes[int(rng.integers(0, len(magnitudes)))]
            e = random_unit_vector(space.family.space(t), rng)
            overrides[t] = np.asarray(origin) + mag * scale * e
        out.append(space.point(u.anchor_id, overrides))
    return out


def sample_closed_product(centers: Sequence[Sequence[float]], radii: Sequence[float], norms,
                          rng: np.random.Generator, count: int) -> List[Tuple[np.ndarray, ...]]:
    """Trace points z with ||z_k - c_k|| <= r_k, including the corners of the radius range."""
    out = []
    for j in range(count):
        z = []
        for c, r, space in zip(centers, radii, norms):
            s = 1.0 if j == 0 else rng.uniform(0.0, 1.0)
            z.append(np.asarray(c) + s * r * random_unit_vector(space, rng))
        out.append(tuple(z))
    return out


def same_component_pairs(space: SigmaSpace, points: Sequence[SparsePoint], rng: np.random.Generator,
                         changes: int = 2, scale: float = 3.0) -> List[Tuple[SparsePoint, SparsePoint]]:
    """Pairs (x, y) where y differs from x at a few random coordinates."""
    pairs = []
    for x in points:
        overrides = x.as_dict()
        for t in rng.choice(np.arange(1, max(x.max_index, 1) + 6), size=changes, replace=False):
            overrides[int(t)] = random_vector(space, int(t), rng, scale)
        pairs.append((x, space.point(x.anchor_id, overrides)))
    return pairs
