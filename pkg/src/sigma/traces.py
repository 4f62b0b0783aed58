"""
Finite-coordinate traces of subsets of sigma(a).

For W inside sigma(a) and T0 = {1..n} the trace is
W_{T0} = {z in Y_n : a_{T0}^z in W}, a subset of Y_n = X_1 x ... x X_n.
Traces are described either analytically, as finite unions of products of
balls (TraceCell), or by a black-box membership test on Y_n.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.sigma.space import CoordVector, SigmaSpace, SparsePoint, SpaceFamily, as_vector

TracePoint = Tuple[CoordVector, ...]


@dataclass(frozen=True)
class BallConstraint:
    """Ball B(center, radius) (open) or B[center, radius] (closed) in one X_i."""
    center: CoordVector
    radius: float
    closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        if self.radius < 0 or (self.radius == 0 and not self.closed):
            raise ValueError(f"Ball radius must be positive (or zero for a closed point), got {self.radius}")

    @property
    def is_open(self) -> bool:
        return not self.closed


@dataclass(frozen=True)
class TraceCell:
    """
    Product over i <= n of per-coordinate balls; coordinates without a
    constraint range over all of X_i.
    """
    n: int
    balls: Tuple[Tuple[int, BallConstraint], ...] = ()

    def __post_init__(self):
        balls = tuple(sorted(self.balls, key=lambda kv: kv[0]))
        for i, _ in balls:
            if not 1 <= i <= self.n:
                raise ValueError(f"Cell of Y_{self.n} cannot constrain index {i}")
        object.__setattr__(self, "balls", balls)

    @property
    def is_open(self) -> bool:
        return all(ball.is_open for _, ball in self.balls)

    def contains(self, family: SpaceFamily, z: Sequence[Sequence[float]]) -> bool:
        for i, ball in self.balls:
            d = family.space(i).norm(np.subtract(z[i - 1], ball.center))
            if ball.closed:
                if d > ball.radius:
                    return False
            elif not d < ball.radius:
                return False
        return True

    def contains_batch(self, family: SpaceFamily, Z: np.ndarray) -> np.ndarray:
        """Membership of the rows of a flat (m, dim(Y_n)) array."""
        inside = np.ones(Z.shape[0], dtype=bool)
        offsets = block_offsets(family, self.n)
        for i, ball in self.balls:
            block = Z[:, offsets[i - 1]:offsets[i]] - np.asarray(ball.center)
            d = family.space(i).batch_norm(block)
            inside &= (d <= ball.radius) if ball.closed else (d < ball.radius)
        return inside

    def margin(self, family: SpaceFamily, centers: Sequence[Sequence[float]],
               radii: Sequence[float]) -> float:
        """
        d_n-distance from K = prod B[centers_i, radii_i] to the complement of
        the cell. Equals min over constrained i of R_i - (||c_i - b_i|| + r_i);
        negative when K is not inside the cell.
        """
        slack = np.inf
        for i, ball in self.balls:
            offset = family.space(i).norm(np.subtract(centers[i - 1], ball.center))
            slack = min(slack, ball.radius - (offset + radii[i - 1]))
        return float(slack)

    def contained_in(self, other: "TraceCell", family: SpaceFamily) -> bool:
        """Exact inclusion test between two cells of the same Y_n."""
        mine = dict(self.balls)
        for i, ball in other.balls:
            own = mine.get(i)
            if own is None:
                return False
            reach = family.space(i).norm(np.subtract(own.center, ball.center)) + own.radius
            if ball.closed or own.is_open:
                if reach > ball.radius:
                    return False
            elif not reach < ball.radius:
                return False
        return True

    def boundary_points(self, family: SpaceFamily) -> List[TracePoint]:
        """
        Points of the cell's topological boundary that the cell contains
        (empty for open cells). Unconstrained coordinates sit at zero.
        """
        if self.is_open:
            return []
        base = [family.space(i).zero() for i in range(1, self.n + 1)]
        for i, ball in self.balls:
            base[i - 1] = ball.center
        points = []
        for i, ball in self.balls:
            if ball.closed:
                z = list(base)
                e = np.zeros(family.space(i).dim)
                e[0] = 1.0
                z[i - 1] = as_vector(np.asarray(ball.center) + ball.radius * e)
                points.append(tuple(z))
        return points

    def interior_points(self, family: SpaceFamily, inset: float) -> List[TracePoint]:
        """The cell's center and points pulled `inset` inside each constrained sphere."""
        base = [family.space(i).zero() for i in range(1, self.n + 1)]
        for i, ball in self.balls:
            base[i - 1] = ball.center
        points = [tuple(base)]
        for i, ball in self.balls:
            if ball.radius > 2 * inset:
                for sign in (1.0, -1.0):
                    z = list(base)
                    e = np.zeros(family.space(i).dim)
                    e[0] = sign
                    z[i - 1] = as_vector(np.asarray(ball.center) + (ball.radius - inset) * e)
                    points.append(tuple(z))
        return points


def block_offsets(family: SpaceFamily, n: int) -> List[int]:
    offsets = [0]
    for space in family.spaces(n):
        offsets.append(offsets[-1] + space.dim)
    return offsets


def flatten(z: Sequence[Sequence[float]]) -> np.ndarray:
    """Concatenate the coordinates of a point of Y_n."""
    return np.concatenate([np.asarray(v, dtype=float) for v in z]) if len(z) else np.zeros(0)


def unflatten(family: SpaceFamily, n: int, flat: Sequence[float]) -> TracePoint:
    offsets = block_offsets(family, n)
    return tuple(as_vector(flat[offsets[i]:offsets[i + 1]]) for i in range(n))


def embed(space: SigmaSpace, anchor_id: str, n: int, z: Sequence[Sequence[float]]) -> SparsePoint:
    """The point a_{1..n}^z: z on the first n coordinates, the anchor elsewhere."""
    return space.point(anchor_id, {i: z[i - 1] for i in range(1, n + 1)})


class TraceFamily:
    """
    The traces W_{1..n} of one set W inside sigma(anchor), for every n.

    Analytic families give the cells of each trace; black-box families give
    only a membership test on Y_n.
    """

    def __init__(self, space: SigmaSpace, anchor_id: str,
                 cells: Optional[Callable[[int], List[TraceCell]]] = None,
                 member: Optional[Callable[[int, TracePoint], bool]] = None,
                 name: str = ""):
        if cells is None and member is None:
            raise ValueError("A trace family needs cells or a membership test")
        self.space = space
        self.anchor_id = anchor_id
        self._cells = cells
        self._member = member
        self.name = name

    def __repr__(self) -> str:
        kind = "analytic" if self.analytic else "black-box"
        return f"TraceFamily({self.name or '?'}, anchor={self.anchor_id!r}, {kind})"

    @property
    def analytic(self) -> bool:
        return self._cells is not None

    @property
    def family(self) -> SpaceFamily:
        return self.space.family

    def cells(self, n: int) -> List[TraceCell]:
        if self._cells is None:
            raise ValueError(f"Trace family {self.name!r} has no analytic description")
        return self._cells(n)

    def contains(self, n: int, z: Sequence[Sequence[float]]) -> bool:
        if self._cells is not None:
            return any(cell.contains(self.family, z) for cell in self._cells(n))
        return bool(self._member(n, tuple(as_vector(v) for v in z)))

    def contains_batch(self, n: int, Z: np.ndarray) -> np.ndarray:
        if self._cells is not None:
            inside = np.zeros(Z.shape[0], dtype=bool)
            for cell in self._cells(n):
                inside |= cell.contains_batch(self.family, Z)
            return inside
        return np.array([self.contains(n, unflatten(self.family, n, row)) for row in Z], dtype=bool)

    def embed(self, n: int, z: Sequence[Sequence[float]]) -> SparsePoint:
        """The point a_{1..n}^z of sigma(anchor)."""
        return embed(self.space, self.anchor_id, n, z)

    def union(self, other: "TraceFamily") -> "TraceFamily":
        if other.anchor_id != self.anchor_id:
            raise ValueError("Traces of sets over different anchors cannot be merged")
        name = f"{self.name}|{other.name}"
        if self.analytic and other.analytic:
            return TraceFamily(self.space, self.anchor_id,
                               cells=lambda n: self.cells(n) + other.cells(n), name=name)
        return TraceFamily(self.space, self.anchor_id,
                           member=lambda n, z: self.contains(n, z) or other.contains(n, z), name=name)


def trace_of_ball_product(space: SigmaSpace, center: SparsePoint,
                          radius: Callable[[int], float], closed: bool = False,
                          name: str = "ball-product") -> TraceFamily:
    """
    Traces of W = prod B(w_i, r_i) cap sigma(a) (or of the closed product).

    W_{1..n} is the product of the first n balls when the anchor's later
    coordinates lie in their balls, and empty otherwise. Only indices where w
    differs from the anchor can fail that test.
    """
    anchor_id = center.anchor_id

    def cells(n: int) -> List[TraceCell]:
        for i in center.support:
            if i > n:
                d = space.coordinate_distance(space.base_point(anchor_id), center, i)
                if (d > radius(i)) if closed else (not d < radius(i)):
                    return []
        balls = tuple((i, BallConstraint(space.coordinate(center, i), radius(i), closed))
                      for i in range(1, n + 1))
        return [TraceCell(n, balls)]

    return TraceFamily(space, anchor_id, cells=cells, name=name)


def trace_of_point(space: SigmaSpace, x: SparsePoint, name: str = "singleton") -> TraceFamily:
    """Traces of the singleton {x}: a closed point cell once n covers x's support."""
    def cells(n: int) -> List[TraceCell]:
        if x.max_index > n:
            return []
        balls = tuple((i, BallConstraint(space.coordinate(x, i), 0.0, closed=True))
                      for i in range(1, n + 1))
        return [TraceCell(n, balls)]

    return TraceFamily(space, x.anchor_id, cells=cells, name=name)


def trace_of_predicate(space: SigmaSpace, anchor_id: str,
                       predicate: Callable[[SparsePoint], bool], name: str = "black-box") -> TraceFamily:
    """Black-box traces of any membership test, through the splice embedding."""
    return TraceFamily(space, anchor_id,
                       member=lambda n, z: bool(predicate(embed(space, anchor_id, n, z))), name=name)
