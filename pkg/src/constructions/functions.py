"""
Evaluable strongly separately continuous functions on sigma(a).

The single ball-product construction moves W to the product of open unit balls
with h(x) = ((x_n - w_n) / r_n), scores the first coordinate that escapes the
unit ball by the distance of the earlier coordinates to the unit spheres, and
clamps at 1. Countable unions become weighted sums; component indicators,
algebra nodes, finite series and finite-coordinate functions complete the
family.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.constructions.ball_product import BallProduct, NearlyOpenUnion
from src.sigma.errors import AnchorMismatchError, PreconditionError
from src.sigma.space import ZERO_ANCHOR, BoxNeighborhood, SigmaSpace, SparsePoint
from src.sigma.topology import SetPredicate, black_box, component_union, empty_set, fresh_anchor, whole_space
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


class FunctionKind(str, Enum):
    THM52 = "THM52"
    THM53_UNION = "THM53_UNION"
    COMPONENT_INDICATOR = "COMPONENT_INDICATOR"
    ALGEBRA = "ALGEBRA"
    SERIES = "SERIES"
    COORDINATE = "COORDINATE"


@dataclass(frozen=True)
class RegionTag:
    """INSIDE_W' or ESCAPE(n): n is the first index with ||z_n|| >= 1."""
    escape: Optional[int] = None

    @property
    def inside(self) -> bool:
        return self.escape is None

    def __str__(self) -> str:
        return "INSIDE_W'" if self.inside else f"ESCAPE({self.escape})"


INSIDE = RegionTag()

Frame = Tuple[Optional[Tuple[float, ...]], float]


# Region geometry in transformed coordinates

def h_transform(space: SigmaSpace, x: SparsePoint, bp: BallProduct) -> SparsePoint:
    """h(x) = ((x_n - w_n) / r_n), a point over the zero anchor."""
    if x.anchor_id != bp.anchor_id:
        raise AnchorMismatchError(f"Point over {x.anchor_id!r} used with a ball product over {bp.anchor_id!r}")
    overrides = {}
    for n in bp.relevant_indices(x):
        diff = np.subtract(space.coordinate(x, n), space.coordinate(bp.center, n))
        overrides[n] = diff / bp.radii(n)
    return space.point(ZERO_ANCHOR, overrides)


def h_inverse(space: SigmaSpace, z: SparsePoint, bp: BallProduct) -> SparsePoint:
    """x = w + r * z coordinatewise, the inverse of h_transform."""
    if z.anchor_id != ZERO_ANCHOR:
        raise AnchorMismatchError("Transformed points live over the zero anchor")
    overrides = {}
    for n in sorted(set(z.support) | set(bp.center.support)):
        center = np.asarray(space.coordinate(bp.center, n))
        overrides[n] = center + bp.radii(n) * np.asarray(space.coordinate(z, n))
    return space.point(bp.anchor_id, overrides)


def classify_region(space: SigmaSpace, z: SparsePoint) -> RegionTag:
    """ESCAPE(n) for the least n with ||z_n|| >= 1, INSIDE_W' if there is none."""
    if z.anchor_id != ZERO_ANCHOR:
        raise AnchorMismatchError("Transformed points live over the zero anchor")
    for n, v in z.overrides:
        if space.family.space(n).norm(v) >= 1.0:
            return RegionTag(n)
    return INSIDE


def sphere_distances(space: SigmaSpace, z: SparsePoint, n: int) -> float:
    """min over i <= n of | ||z_i|| - 1 |; coordinates off the support contribute 1."""
    best, covered = np.inf, 0
    for i, v in z.overrides:
        if i > n:
            break
        best = min(best, space.family.space(i).dist_to_unit_sphere(v))
        covered += 1
    if covered < n:
        best = min(best, 1.0)
    return float(best)


def evaluate_g(space: SigmaSpace, z: SparsePoint) -> float:
    """g(z) = distance of the first n coordinates to Y_n minus A_n on ESCAPE(n), 0 inside."""
    region = classify_region(space, z)
    if region.inside:
        return 0.0
    return sphere_distances(space, z, region.escape)


# Functions

class ConstructedFunction(ABC):
    """An evaluable function on sigma-products with construction metadata."""

    kind: FunctionKind

    def __init__(self, space: SigmaSpace, name: str = ""):
        self.space = space
        self.name = name or self.kind.value.lower()

    def __call__(self, x: SparsePoint) -> float:
        return self.evaluate(x)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"

    @property
    def anchor_id(self) -> Optional[str]:
        """Anchor the function is defined over, None when any anchor is accepted."""
        return None

    @property
    def children(self) -> Tuple["ConstructedFunction", ...]:
        return ()

    @abstractmethod
    def evaluate(self, x: SparsePoint) -> float:
        """Value of the function at x."""

    def claimed_discontinuities(self) -> Optional[SetPredicate]:
        """Structural description of the claimed discontinuity set, if any."""
        return None

    def value_range(self) -> Tuple[float, float]:
        return (-math.inf, math.inf)

    def witnesses(self, u: SparsePoint, box: BoxNeighborhood) -> List[SparsePoint]:
        """Points of the box where the value is expected to stay away from f(u)."""
        return []

    def probe_frames(self, t: int) -> List[Frame]:
        """
        (origin, scale) pairs for probing coordinate t: probes sit at
        origin + magnitude * scale * e. A None origin means the probed point's
        own coordinate.
        """
        frames: List[Frame] = []
        for child in self.children:
            frames.extend(child.probe_frames(t))
        return frames or [(None, 1.0)]

    def _check_anchor(self, x: SparsePoint) -> None:
        if self.anchor_id is not None and x.anchor_id != self.anchor_id:
            raise AnchorMismatchError(
                f"{self.name} is defined over {self.anchor_id!r}, got a point over {x.anchor_id!r}")

    def describe(self) -> Dict:
        return {
            "name": self.name,
            "kind": self.kind.value,
            "anchor": self.anchor_id,
            "range": list(self.value_range()),
            "children": [child.describe() for child in self.children],
        }


class Thm52Function(ConstructedFunction):
    """f = min(g o h, 1) for one ball product; D(f) = W and f vanishes on W."""

    kind = FunctionKind.THM52

    def __init__(self, space: SigmaSpace, bp: BallProduct, name: str = ""):
        super().__init__(space, name)
        space.anchor(bp.anchor_id)
        self.bp = bp

    @property
    def anchor_id(self) -> str:
        return self.bp.anchor_id

    def h(self, x: SparsePoint) -> SparsePoint:
        return h_transform(self.space, x, self.bp)

    def h_inverse(self, z: SparsePoint) -> SparsePoint:
        return h_inverse(self.space, z, self.bp)

    def evaluate(self, x: SparsePoint) -> float:
        self._check_anchor(x)
        return min(evaluate_g(self.space, self.h(x)), 1.0)

    def claimed_discontinuities(self) -> SetPredicate:
        return self.bp.predicate(self.space, name=f"D({self.name})")

    def value_range(self) -> Tuple[float, float]:
        return (0.0, 1.0)

    def escape_rho(self, u: SparsePoint) -> Tuple[float, int]:
        """rho = min over i <= n of dist(h(u)_i, S_i), with n the last support index of h(u)."""
        z = self.h(u)
        if not classify_region(self.space, z).inside:
            raise PreconditionError(f"Point is not in the claimed set of {self.name}")
        n = max(z.max_index, 1)
        rho = sphere_distances(self.space, z, n)
        if not 0.0 < rho <= 1.0:
            raise PreconditionError(f"Escape distance {rho} outside (0, 1]")
        return rho, n

    def escape_witness(self, u: SparsePoint, m: int) -> SparsePoint:
        """u with coordinate m+n pushed to w + r (1 + rho) e, where f takes the value rho."""
        if m < 1:
            raise PreconditionError(f"Witness index offset must be >= 1, got {m}")
        rho, n = self.escape_rho(u)
        k = m + n
        e = np.zeros(self.space.family.space(k).dim)
        e[0] = 1.0
        value = np.asarray(self.space.coordinate(self.bp.center, k)) + self.bp.radii(k) * (1.0 + rho) * e
        return self.space.with_coordinate(u, k, value)

    def witnesses(self, u: SparsePoint, box: BoxNeighborhood, beyond: int = 0) -> List[SparsePoint]:
        """The escape witness at the first index past the box and past `beyond`."""
        if u.anchor_id != self.anchor_id or not self.bp.contains(self.space, u):
            return []
        _, n = self.escape_rho(u)
        m = max(1, max(box.horizon, beyond) - n + 1)
        return [self.escape_witness(u, m)]

    def probe_frames(self, t: int) -> List[Frame]:
        return [(self.space.coordinate(self.bp.center, t), self.bp.radii(t))]

    def describe(self) -> Dict:
        info = super().describe()
        info["ball_product"] = self.bp.to_dict()
        return info


class Thm53Function(ConstructedFunction):
    """f = sum over m of 2^-m f_m for the members W_m of a finite union."""

    kind = FunctionKind.THM53_UNION

    def __init__(self, space: SigmaSpace, union: NearlyOpenUnion, name: str = ""):
        super().__init__(space, name)
        self.union = union
        self.parts = tuple(Thm52Function(space, bp, name=f"{self.name}[{m}]")
                           for m, bp in enumerate(union.members, start=1))

    @property
    def anchor_id(self) -> str:
        return self.union.anchor_id

    @property
    def children(self) -> Tuple[ConstructedFunction, ...]:
        return self.parts

    def partial_sum(self, x: SparsePoint, terms: int) -> float:
        """Sum of the first `terms` weighted children, in index order."""
        self._check_anchor(x)
        return math.fsum(2.0 ** -m * part.evaluate(x)
                         for m, part in enumerate(self.parts[:terms], start=1))

    def evaluate(self, x: SparsePoint) -> float:
        return self.partial_sum(x, len(self.parts))

    def claimed_discontinuities(self) -> SetPredicate:
        return self.union.predicate(self.space, name=f"D({self.name})")

    def value_range(self) -> Tuple[float, float]:
        return (0.0, 1.0 - 2.0 ** -len(self.parts))

    def witnesses(self, u: SparsePoint, box: BoxNeighborhood) -> List[SparsePoint]:
        # Witnesses sit past every center's support. A witness of member m gives f >= 2^-m rho_m;
        # the other children stay >= 0 but may change when u lies in several members.
        beyond = max([u.max_index] + [bp.center.max_index for bp in self.union.members])
        out = []
        for part in self.parts:
            out.extend(part.witnesses(u, box, beyond))
        return out

    def describe(self) -> Dict:
        info = super().describe()
        info["members"] = len(self.parts)
        return info


class ComponentIndicator(ConstructedFunction):
    """y1 on sigma(x0), y2 elsewhere; constant on every S-component."""

    kind = FunctionKind.COMPONENT_INDICATOR

    def __init__(self, space: SigmaSpace, x0: SparsePoint, y1: float = 0.0, y2: float = 1.0, name: str = ""):
        super().__init__(space, name)
        space.anchor(x0.anchor_id)
        self.x0 = x0
        self.y1 = float(y1)
        self.y2 = float(y2)

    def evaluate(self, x: SparsePoint) -> float:
        return self.y1 if self.space.same_component(x, self.x0) else self.y2

    def claimed_discontinuities(self) -> SetPredicate:
        return whole_space() if self.y1 != self.y2 else empty_set()

    def value_range(self) -> Tuple[float, float]:
        return (min(self.y1, self.y2), max(self.y1, self.y2))

    def witnesses(self, u: SparsePoint, box: BoxNeighborhood) -> List[SparsePoint]:
        """Cross-component points of the box, spliced from the base of another component."""
        if self.space.same_component(u, self.x0):
            others = [k for k in self.space.anchor_ids if k != self.x0.anchor_id]
            target = others[0] if others else fresh_anchor(self.space)
        else:
            target = self.x0.anchor_id
        return [self.space.splice(self.space.base_point(target), box.indices, box.center)]

    def component_predicate(self) -> SetPredicate:
        return component_union([self.x0.anchor_id])

    def describe(self) -> Dict:
        info = super().describe()
        info.update({"x0_anchor": self.x0.anchor_id, "y1": self.y1, "y2": self.y2})
        return info


_UNARY = {
    "abs": abs,
    "neg": lambda v: -v,
}

_NARY = {
    "add": math.fsum,
    "mul": lambda vs: reduce(lambda p, q: p * q, vs, 1.0),
    "min": min,
    "max": max,
}

ALGEBRA_OPS = tuple(_UNARY) + tuple(_NARY) + ("sub",)


class AlgebraFunction(ConstructedFunction):
    """Pointwise sum, difference, product, absolute value, min or max of children."""

    kind = FunctionKind.ALGEBRA

    def __init__(self, space: SigmaSpace, op: str, children: Sequence[ConstructedFunction], name: str = ""):
        super().__init__(space, name)
        if op not in ALGEBRA_OPS:
            raise ValueError(f"Unknown algebra operation {op!r}; expected one of {', '.join(ALGEBRA_OPS)}")
        arity = len(children)
        if (op in _UNARY and arity != 1) or (op == "sub" and arity != 2) or arity < 1:
            raise ValueError(f"Operation {op!r} cannot take {arity} operands")
        anchors = {c.anchor_id for c in children} - {None}
        if len(anchors) > 1:
            raise AnchorMismatchError(f"Children live over different anchors: {sorted(anchors)}")
        self.op = op
        self._children = tuple(children)
        self._anchor = next(iter(anchors), None)

    @property
    def anchor_id(self) -> Optional[str]:
        return self._anchor

    @property
    def children(self) -> Tuple[ConstructedFunction, ...]:
        return self._children

    def evaluate(self, x: SparsePoint) -> float:
        values = [child.evaluate(x) for child in self._children]
        if self.op in _UNARY:
            return float(_UNARY[self.op](values[0]))
        if self.op == "sub":
            return values[0] - values[1]
        return float(_NARY[self.op](values))

    def witnesses(self, u: SparsePoint, box: BoxNeighborhood) -> List[SparsePoint]:
        out = []
        for child in self._children:
            out.extend(child.witnesses(u, box))
        return out

    def describe(self) -> Dict:
        info = super().describe()
        info["op"] = self.op
        return info


class SeriesFunction(ConstructedFunction):
    """Finite weighted sum of children; `tail_bound` bounds the omitted remainder uniformly."""

    kind = FunctionKind.SERIES

    def __init__(self, space: SigmaSpace, weights: Sequence[float], children: Sequence[ConstructedFunction],
                 tail_bound: float = 0.0, name: str = ""):
        super().__init__(space, name)
        if len(weights) != len(children) or not children:
            raise ValueError("A series needs one weight per child and at least one child")
        if tail_bound < 0:
            raise ValueError("The tail bound must be nonnegative")
        anchors = {c.anchor_id for c in children} - {None}
        if len(anchors) > 1:
            raise AnchorMismatchError(f"Children live over different anchors: {sorted(anchors)}")
        self.weights = tuple(float(w) for w in weights)
        self._children = tuple(children)
        self.tail_bound = float(tail_bound)
        self._anchor = next(iter(anchors), None)

    @property
    def anchor_id(self) -> Optional[str]:
        return self._anchor

    @property
    def children(self) -> Tuple[ConstructedFunction, ...]:
        return self._children

    def partial_sum(self, x: SparsePoint, terms: int) -> float:
        return math.fsum(w * child.evaluate(x) for w, child in zip(self.weights[:terms], self._children[:terms]))

    def evaluate(self, x: SparsePoint) -> float:
        return self.partial_sum(x, len(self._children))

    def truncation_bound(self, terms: int) -> float:
        """Uniform bound on |f - partial_sum(terms)| from the children's ranges."""
        rest = 0.0
        for w, child in zip(self.weights[terms:], self._children[terms:]):
            lo, hi = child.value_range()
            rest += abs(w) * max(abs(lo), abs(hi))
        return rest + self.tail_bound

    def witnesses(self, u: SparsePoint, box: BoxNeighborhood) -> List[SparsePoint]:
        out = []
        for child in self._children:
            out.extend(child.witnesses(u, box))
        return out

    def describe(self) -> Dict:
        info = super().describe()
        info.update({"weights": list(self.weights), "tail_bound": self.tail_bound})
        return info


# Finite-coordinate profiles: value from the coordinates at `indices`.
Profile = Callable[[SigmaSpace, Sequence[np.ndarray], Sequence[int]], float]


def _norms(space: SigmaSpace, vs: Sequence[np.ndarray], idx: Sequence[int]) -> List[float]:
    return [space.family.space(i).norm(v) for i, v in zip(idx, vs)]


PROFILES: Dict[str, Profile] = {
    "norm": lambda s, vs, idx: _norms(s, vs[:1], idx[:1])[0],
    "sum_norms": lambda s, vs, idx: math.fsum(_norms(s, vs, idx)),
    "product": lambda s, vs, idx: float(np.prod([v[0] for v in vs])),
    "max_norm": lambda s, vs, idx: max(_norms(s, vs, idx)),
    "nonzero": lambda s, vs, idx: 1.0 if _norms(s, vs[:1], idx[:1])[0] > 0.0 else 0.0,
    "sphere_step": lambda s, vs, idx: 1.0 if _norms(s, vs[:1], idx[:1])[0] >= 1.0 else 0.0,
}

CONTINUOUS_PROFILES = frozenset({"norm", "sum_norms", "product", "max_norm"})


class CoordinateFunction(ConstructedFunction):
    """A function of finitely many coordinates, evaluable over any anchor."""

    kind = FunctionKind.COORDINATE

    def __init__(self, space: SigmaSpace, profile: str, indices: Sequence[int] = (1,), name: str = ""):
        super().__init__(space, name or profile)
        if profile not in PROFILES:
            raise ValueError(f"Unknown profile {profile!r}; expected one of {', '.join(sorted(PROFILES))}")
        indices = tuple(int(i) for i in indices)
        if not indices or min(indices) < 1:
            raise PreconditionError("Coordinate functions need indices >= 1")
        self.profile = profile
        self.indices = indices

    @property
    def continuous(self) -> bool:
        return self.profile in CONTINUOUS_PROFILES

    def evaluate(self, x: SparsePoint) -> float:
        vs = [np.asarray(self.space.coordinate(x, i)) for i in self.indices]
        return float(PROFILES[self.profile](self.space, vs, self.indices))

    def claimed_discontinuities(self) -> SetPredicate:
        if self.continuous:
            return empty_set()
        i = self.indices[0]
        if self.profile == "nonzero":
            return black_box(lambda x: self.space.family.space(i).norm(self.space.coordinate(x, i)) == 0.0,
                             name=f"x_{i}=0")
        return black_box(lambda x: self.space.family.space(i).norm(self.space.coordinate(x, i)) == 1.0,
                         name=f"|x_{i}|=1")

    def witnesses(self, u: SparsePoint, box: BoxNeighborhood) -> List[SparsePoint]:
        i = self.indices[0]
        coord = np.asarray(self.space.coordinate(u, i))
        if self.profile != "nonzero" or np.any(coord):
            return []
        step = 0.5 * min(box.radius(i) or 1.0, 1.0)
        e = np.zeros(coord.shape)
        e[0] = step
        return [self.space.with_coordinate(u, i, e)]

    def value_range(self) -> Tuple[float, float]:
        if self.profile in ("nonzero", "sphere_step"):
            return (0.0, 1.0)
        return super().value_range()

    def describe(self) -> Dict:
        info = super().describe()
        info.update({"profile": self.profile, "indices": list(self.indices)})
        return info


# Builders

def build_thm52(space: SigmaSpace, bp: BallProduct, name: str = "") -> Thm52Function:
    logger.debug(f"Building single ball-product function over {bp.anchor_id!r}")
    return Thm52Function(space, bp, name)


def build_thm53(space: SigmaSpace, union: NearlyOpenUnion, name: str = "") -> Thm53Function:
    logger.debug(f"Building weighted union of {len(union)} ball products over {union.anchor_id!r}")
    return Thm53Function(space, union, name)


def component_indicator(space: SigmaSpace, x0: SparsePoint, y1: float = 0.0, y2: float = 1.0,
                        name: str = "") -> ComponentIndicator:
    return ComponentIndicator(space, x0, y1, y2, name)


def algebra(space: SigmaSpace, op: str, children: Sequence[ConstructedFunction], name: str = "") -> AlgebraFunction:
    return AlgebraFunction(space, op, children, name)


def series(space: SigmaSpace, weights: Sequence[float], children: Sequence[ConstructedFunction],
           tail_bound: float = 0.0, name: str = "") -> SeriesFunction:
    return SeriesFunction(space, weights, children, tail_bound, name)


def coordinate_function(space: SigmaSpace, profile: str, indices: Sequence[int] = (1,),
                        name: str = "") -> CoordinateFunction:
    return CoordinateFunction(space, profile, indices, name)


def evaluate(f: ConstructedFunction, x: SparsePoint) -> float:
    """Value of a constructed function at a sparse point."""
    return f.evaluate(x)
