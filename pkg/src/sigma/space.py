"""
Sparse points of sigma-products of finite-dimensional normed spaces.

A point of sigma(a) is stored as its anchor label plus the finitely many
coordinates where it differs from the anchor. Every coordinate space X_n is
R^dim with an l1, l2 or l-infinity norm; index n runs over 1, 2, 3, ...

Coordinate vectors are plain tuples of floats, so points compare and hash
exactly. Numeric work converts them to numpy arrays on the fly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from src.sigma.errors import (
    AnchorLookupError,
    DimensionMismatchError,
    PreconditionError,
)

CoordVector = Tuple[float, ...]

INFINITE = math.inf
ZERO_ANCHOR = "zero"


class NormKind(str, Enum):
    """Norm on a coordinate space."""
    L1 = "L1"
    L2 = "L2"
    LINF = "LINF"


_NORM_ORDER = {NormKind.L1: 1, NormKind.L2: 2, NormKind.LINF: np.inf}


def as_vector(values: Union[Sequence[float], np.ndarray, float]) -> CoordVector:
    """Convert numbers to a CoordVector, rejecting NaN and infinities."""
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1:
        raise DimensionMismatchError(f"Coordinate vectors are one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"Coordinate entries must be finite, got {arr.tolist()}")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class CoordSpace:
    """One coordinate space X_n = (R^dim, norm_kind)."""
    dim: int
    norm_kind: NormKind = NormKind.L2

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"Coordinate dimension must be a positive integer, got {self.dim}")
        object.__setattr__(self, "norm_kind", NormKind(self.norm_kind))

    def zero(self) -> CoordVector:
        return (0.0,) * self.dim

    def check(self, v: Sequence[float]) -> CoordVector:
        """Validate a vector against this space and return it as a CoordVector."""
        vec = as_vector(v)
        if len(vec) != self.dim:
            raise DimensionMismatchError(f"Expected a vector of dimension {self.dim}, got {len(vec)}")
        return vec

    def norm(self, v: Union[Sequence[float], np.ndarray]) -> float:
        arr = np.asarray(v, dtype=float)
        if arr.shape != (self.dim,):
            raise DimensionMismatchError(f"Expected a vector of dimension {self.dim}, got shape {arr.shape}")
        return float(np.linalg.norm(arr, ord=_NORM_ORDER[self.norm_kind]))

    def batch_norm(self, arr: np.ndarray) -> np.ndarray:
        """Norms of the rows of an (m, dim) array."""
        return np.linalg.norm(arr, ord=_NORM_ORDER[self.norm_kind], axis=-1)

    def dist_to_unit_sphere(self, v: Sequence[float]) -> float:
        """
        Distance from v to the unit sphere S = {s : ||s|| = 1}.

        For any norm, | ||v|| - 1 | is attained at v/||v|| (or at any unit
        vector when v = 0) and bounds the distance from below by the
        reverse triangle inequality.
        """
        return abs(self.norm(v) - 1.0)


def norm(space: CoordSpace, v: Sequence[float]) -> float:
    """Norm of v in the coordinate space."""
    return space.norm(v)


def dist_to_unit_sphere(space: CoordSpace, v: Sequence[float]) -> float:
    """Distance from v to the unit sphere of the coordinate space."""
    return space.dist_to_unit_sphere(v)


def random_unit_vector(space: CoordSpace, rng: np.random.Generator) -> np.ndarray:
    """Uniformly oriented vector of norm exactly one in the space's norm."""
    while True:
        g = rng.standard_normal(space.dim)
        n = space.norm(g)
        if n > 0.0:
            return g / n


@dataclass(frozen=True)
class SpaceFamily:
    """
    The sequence (X_n) of coordinate spaces: an explicit finite prefix
    followed by one space repeated for every later index.
    """
    prefix: Tuple[CoordSpace, ...] = ()
    tail: CoordSpace = CoordSpace(1)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))

    @classmethod
    def uniform(cls, dim: int = 1, norm_kind: NormKind = NormKind.L2) -> "SpaceFamily":
        return cls(prefix=(), tail=CoordSpace(dim, norm_kind))

    def space(self, n: int) -> CoordSpace:
        if n < 1:
            raise PreconditionError(f"Coordinate indices start at 1, got {n}")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return self.tail

    def spaces(self, n: int) -> List[CoordSpace]:
        """The spaces X_1, ..., X_n of Y_n."""
        return [self.space(i) for i in range(1, n + 1)]


def _freeze(items: Iterable[Tuple[int, CoordVector]]) -> Tuple[Tuple[int, CoordVector], ...]:
    return tuple(sorted(items, key=lambda kv: kv[0]))


@dataclass(frozen=True)
class Anchor:
    """A base point of a sigma-component: finitely many nonzero coordinates."""
    anchor_id: str
    values: Tuple[Tuple[int, CoordVector], ...] = ()
    _lookup: Dict[int, CoordVector] = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        values = self.values.items() if isinstance(self.values, Mapping) else self.values
        frozen = _freeze((int(n), as_vector(v)) for n, v in values)
        object.__setattr__(self, "values", frozen)
        object.__setattr__(self, "_lookup", dict(frozen))

    def value(self, n: int) -> Optional[CoordVector]:
        return self._lookup.get(n)

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(n for n, _ in self.values)


@dataclass(frozen=True)
class SparsePoint:
    """
    A point of sigma(anchor): the anchor label plus the coordinates where the
    point differs from the anchor. Build points through SigmaSpace.point so the
    override map is canonical (no override equals the anchor's value).
    """
    anchor_id: str
    overrides: Tuple[Tuple[int, CoordVector], ...] = ()
    _lookup: Dict[int, CoordVector] = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        overrides = self.overrides.items() if isinstance(self.overrides, Mapping) else self.overrides
        frozen = _freeze((int(n), tuple(v)) for n, v in overrides)
        object.__setattr__(self, "overrides", frozen)
        object.__setattr__(self, "_lookup", dict(frozen))

    def override(self, n: int) -> Optional[CoordVector]:
        return self._lookup.get(n)

    @property
    def support(self) -> Tuple[int, ...]:
        """Indices where the point differs from its anchor."""
        return tuple(n for n, _ in self.overrides)

    @property
    def max_index(self) -> int:
        """Largest support index, 0 for the anchor itself."""
        return self.overrides[-1][0] if self.overrides else 0

    def as_dict(self) -> Dict[int, CoordVector]:
        return dict(self._lookup)


@dataclass(frozen=True)
class BoxNeighborhood:
    """
    Basic Tychonoff neighbourhood: open balls around the center's coordinates
    at finitely many indices, every other coordinate free.
    """
    center: SparsePoint
    constraints: Tuple[Tuple[int, float], ...] = ()
    _lookup: Dict[int, float] = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        constraints = self.constraints.items() if isinstance(self.constraints, Mapping) else self.constraints
        frozen = tuple(sorted((int(n), float(r)) for n, r in constraints))
        for n, r in frozen:
            if n < 1:
                raise PreconditionError(f"Coordinate indices start at 1, got {n}")
            if not r > 0.0:
                raise ValueError(f"Box radius at index {n} must be positive, got {r}")
        object.__setattr__(self, "constraints", frozen)
        object.__setattr__(self, "_lookup", dict(frozen))

    @classmethod
    def around(cls, center: SparsePoint, radius: float, horizon: int,
               extra: Iterable[int] = ()) -> "BoxNeighborhood":
        """Box constraining indices 1..horizon (and any extra ones) with one radius."""
        if math.isinf(radius):
            return cls(center)
        indices = set(range(1, horizon + 1)) | set(extra)
        return cls(center, tuple((n, radius) for n in sorted(indices)))

    def radius(self, n: int) -> Optional[float]:
        return self._lookup.get(n)

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(n for n, _ in self.constraints)

    @property
    def horizon(self) -> int:
        """Largest constrained index, 0 for the whole space."""
        return self.constraints[-1][0] if self.constraints else 0


class SigmaSpace:
    """
    A countable product of coordinate spaces together with the registered
    anchors. Distinct anchor ids model distinct sigma-components.
    """

    def __init__(self, family: SpaceFamily, anchors: Iterable[Anchor] = ()):
        self.family = family
        self._anchors: Dict[str, Anchor] = {}
        self.register_anchor(Anchor(ZERO_ANCHOR))
        for anchor in anchors:
            self.register_anchor(anchor)

    def __repr__(self) -> str:
        return f"SigmaSpace(family={self.family!r}, anchors={list(self._anchors)})"

    # Anchors

    def register_anchor(self, anchor: Anchor) -> Anchor:
        """Validate and register an anchor; zero coordinates are dropped."""
        values = []
        for n, v in anchor.values:
            space = self.family.space(n)
            vec = space.check(v)
            if vec != space.zero():
                values.append((n, vec))
        anchor = Anchor(anchor.anchor_id, tuple(values))
        self._anchors[anchor.anchor_id] = anchor
        return anchor

    def anchor(self, anchor_id: str) -> Anchor:
        try:
            return self._anchors[anchor_id]
        except KeyError:
            raise AnchorLookupError(anchor_id) from None

    @property
    def anchor_ids(self) -> Tuple[str, ...]:
        return tuple(self._anchors)

    def anchor_value(self, anchor_id: str, n: int) -> CoordVector:
        value = self.anchor(anchor_id).value(n)
        return value if value is not None else self.family.space(n).zero()

    # Points

    def point(self, anchor_id: str, overrides: Mapping[int, Sequence[float]] = None) -> SparsePoint:
        """Build a canonical point of sigma(anchor) from an override map."""
        self.anchor(anchor_id)
        items = []
        for n, v in (overrides or {}).items():
            n = int(n)
            vec = self.family.space(n).check(v)
            if vec != self.anchor_value(anchor_id, n):
                items.append((n, vec))
        return SparsePoint(anchor_id, tuple(items))

    def base_point(self, anchor_id: str) -> SparsePoint:
        """The anchor itself, as a point."""
        self.anchor(anchor_id)
        return SparsePoint(anchor_id)

    def coordinate(self, x: SparsePoint, n: int) -> CoordVector:
        """The n-th coordinate of x (override if present, anchor value otherwise)."""
        if n < 1:
            raise PreconditionError(f"Coordinate indices start at 1, got {n}")
        value = x.override(n)
        if value is not None:
            return value
        return self.anchor_value(x.anchor_id, n)

    def with_coordinate(self, x: SparsePoint, n: int, v: Sequence[float]) -> SparsePoint:
        """The point x with its n-th coordinate replaced by v."""
        overrides = x.as_dict()
        overrides[n] = v
        return self.point(x.anchor_id, overrides)

    def splice(self, a: SparsePoint, S: Iterable[int], x: SparsePoint) -> SparsePoint:
        """
        The point a_S^x: coordinates of x on S, coordinates of a elsewhere.
        The result lives over a's anchor.
        """
        overrides = a.as_dict()
        for t in S:
            overrides[t] = self.coordinate(x, t)
        return self.point(a.anchor_id, overrides)

    # Components

    def differing_indices(self, x: SparsePoint, y: SparsePoint) -> List[int]:
        """Indices where two points over the same anchor differ."""
        if x.anchor_id != y.anchor_id:
            raise PreconditionError("Points over different anchors differ at infinitely many indices")
        indices = set(x.support) | set(y.support)
        return sorted(n for n in indices if x.override(n) != y.override(n))

    def defect(self, x: SparsePoint, y: SparsePoint) -> Union[int, float]:
        """Number of differing coordinates; INFINITE across anchors."""
        if x.anchor_id != y.anchor_id:
            return INFINITE
        return len(self.differing_indices(x, y))

    def same_component(self, x: SparsePoint, y: SparsePoint) -> bool:
        return x.anchor_id == y.anchor_id

    def in_sigma_n(self, x: SparsePoint, y: SparsePoint, n: int) -> bool:
        """True when y lies in sigma_n(x)."""
        return self.defect(x, y) <= n

    # Metrics and neighbourhoods

    def coordinate_distance(self, x: SparsePoint, y: SparsePoint, n: int) -> float:
        space = self.family.space(n)
        diff = np.subtract(self.coordinate(x, n), self.coordinate(y, n))
        return space.norm(diff)

    def dist_d_n(self, x: SparsePoint, y: SparsePoint, n: int) -> float:
        """d_n(x, y) = max over i <= n of ||x_i - y_i||_i."""
        if n < 1:
            raise PreconditionError(f"d_n needs n >= 1, got {n}")
        candidates = (set(x.support) | set(y.support)
                      | set(self.anchor(x.anchor_id).indices) | set(self.anchor(y.anchor_id).indices))
        dist = 0.0
        for i in candidates:
            if i <= n:
                dist = max(dist, self.coordinate_distance(x, y, i))
        return dist

    def box_contains(self, U: BoxNeighborhood, x: SparsePoint) -> bool:
        """Open-ball membership at every constrained index; any anchor qualifies."""
        for n, r in U.constraints:
            if not self.coordinate_distance(x, U.center, n) < r:
                return False
        return True
