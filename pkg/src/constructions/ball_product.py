"""
Ball products W = (prod B(w_n, r_n)) cap sigma(a) and finite unions of them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from src.sigma.errors import AnchorMismatchError, EmptyUnionError
from src.sigma.space import SigmaSpace, SparsePoint
from src.sigma.topology import SetPredicate, ball_product_union
from src.sigma.traces import TraceFamily, trace_of_ball_product


@dataclass(frozen=True)
class Radii:
    """Eventually constant radius sequence: r_n = prefix[n-1], then tail."""
    prefix: Tuple[float, ...] = ()
    tail: float = 1.0

    def __post_init__(self):
        prefix = tuple(float(r) for r in self.prefix)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "tail", float(self.tail))
        for r in prefix + (self.tail,):
            if not (r > 0.0 and np.isfinite(r)):
                raise ValueError(f"Radii must be positive and finite, got {r}")

    @classmethod
    def constant(cls, r: float) -> "Radii":
        return cls((), r)

    def __call__(self, n: int) -> float:
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return self.tail

    def to_dict(self) -> Dict:
        return {"prefix": list(self.prefix), "tail": self.tail}


@dataclass(frozen=True)
class BallProduct:
    """The open set W of points of sigma(a) with ||x_n - w_n|| < r_n for every n."""
    center: SparsePoint
    radii: Radii

    @property
    def anchor_id(self) -> str:
        return self.center.anchor_id

    def relevant_indices(self, x: SparsePoint) -> List[int]:
        """Indices where x and the center can differ; elsewhere both equal the anchor."""
        return sorted(set(x.support) | set(self.center.support))

    def _offsets(self, space: SigmaSpace, x: SparsePoint) -> Iterable[Tuple[int, float]]:
        for n in self.relevant_indices(x):
            yield n, space.coordinate_distance(x, self.center, n)

    def contains(self, space: SigmaSpace, x: SparsePoint) -> bool:
        if x.anchor_id != self.anchor_id:
            return False
        return all(d < self.radii(n) for n, d in self._offsets(space, x))

    def closure_contains(self, space: SigmaSpace, x: SparsePoint) -> bool:
        """Membership in the closed product prod B[w_n, r_n] cap sigma(a)."""
        if x.anchor_id != self.anchor_id:
            return False
        return all(d <= self.radii(n) for n, d in self._offsets(space, x))

    def traces(self, space: SigmaSpace) -> TraceFamily:
        return trace_of_ball_product(space, self.center, self.radii, name="W")

    def predicate(self, space: SigmaSpace, name: str = "W") -> SetPredicate:
        return ball_product_union(lambda x: self.contains(space, x), self.traces(space), name)

    def to_dict(self) -> Dict:
        return {"anchor": self.anchor_id, "center": self.center.as_dict(), "radii": self.radii.to_dict()}


@dataclass(frozen=True)
class NearlyOpenUnion:
    """Ordered finite union W_1 u ... u W_M of ball products over one anchor."""
    members: Tuple[BallProduct, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise EmptyUnionError("A union needs at least one ball product")
        anchors = {bp.anchor_id for bp in members}
        if len(anchors) != 1:
            raise AnchorMismatchError(f"Ball products of a union share one anchor, got {sorted(anchors)}")
        object.__setattr__(self, "members", members)

    @property
    def anchor_id(self) -> str:
        return self.members[0].anchor_id

    def __len__(self) -> int:
        return len(self.members)

    def contains(self, space: SigmaSpace, x: SparsePoint) -> bool:
        return any(bp.contains(space, x) for bp in self.members)

    def closure_contains(self, space: SigmaSpace, x: SparsePoint) -> bool:
        return any(bp.closure_contains(space, x) for bp in self.members)

    def traces(self, space: SigmaSpace) -> TraceFamily:
        family = self.members[0].traces(space)
        for bp in self.members[1:]:
            family = family.union(bp.traces(space))
        return family

    def predicate(self, space: SigmaSpace, name: str = "W") -> SetPredicate:
        return ball_product_union(lambda x: self.contains(space, x), self.traces(space), name)


def ball_product_from_radii(space: SigmaSpace, x: SparsePoint, radii: Sequence[float]) -> BallProduct:
    """
    The ball product W(x) around x with the given radii prefix, continued by the
    last radius. Built from a radius extension, its closure stays inside the
    set through the extension's horizon.
    """
    if not radii:
        raise ValueError("At least one radius is needed")
    space.anchor(x.anchor_id)
    return BallProduct(x, Radii(tuple(radii), radii[-1]))
