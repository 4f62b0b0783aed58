"""
Report records returned by the checks in this package.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from src.sigma.space import BoxNeighborhood, SparsePoint
from src.sigma.verdicts import Certainty, Status


def _point(x: Optional[SparsePoint]) -> Optional[Dict[str, Any]]:
    if x is None:
        return None
    return {"anchor": x.anchor_id, "overrides": {n: list(v) for n, v in x.overrides}}


@dataclass
class CheckReport:
    """Outcome of a sampled check, with the per-level sequence it was decided on."""
    check: str
    status: Status
    certainty: Certainty = Certainty.EVIDENCE
    metric: Optional[float] = None
    sequence: List[float] = field(default_factory=list)
    witness: Optional[Tuple[SparsePoint, ...]] = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == Status.PASS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "status": self.status.value,
            "certainty": self.certainty.value,
            "metric": self.metric,
            "sequence": list(self.sequence),
            "witness": None if self.witness is None else [_point(w) for w in self.witness],
            "detail": self.detail,
        }


@dataclass
class OscillationEstimate:
    """
    Oscillation of f at a point: a certified lower bound from exactly
    evaluated pairs inside every box level and a sampled upper estimate per
    level (nonincreasing).
    """
    point: SparsePoint
    certified_lower: float
    level_lower: List[float]
    sampled_upper: List[float]
    witness_pairs: List[Tuple[SparsePoint, SparsePoint, float]]
    verdict: Status
    tol: float

    @property
    def metric(self) -> float:
        return self.certified_lower

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": _point(self.point),
            "certified_lower": self.certified_lower,
            "level_lower": list(self.level_lower),
            "sampled_upper": list(self.sampled_upper),
            "witness_pairs": [(_point(a), _point(b), d) for a, b, d in self.witness_pairs],
            "verdict": self.verdict.value,
            "tol": self.tol,
        }


@dataclass
class CriterionResult:
    """FOUND(T0, U) or a budget-stamped NOT_FOUND for the finite-coordinate criterion."""
    status: Status
    T0: Optional[Tuple[int, ...]]
    box: Optional[BoxNeighborhood]
    worst: Optional[float]
    budget: Dict[str, Any]
    tried: int = 0

    @property
    def found(self) -> bool:
        return self.status == Status.FOUND

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "T0": None if self.T0 is None else list(self.T0),
            "box": None if self.box is None else dict(self.box.constraints),
            "worst": self.worst,
            "budget": self.budget,
            "tried": self.tried,
        }


@dataclass
class TraceVerdict:
    """Openness of one trace W_{1..n}."""
    n: int
    status: Status
    certainty: Certainty
    witness: Optional[Tuple[Tuple[float, ...], ...]] = None
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "status": self.status.value,
            "certainty": self.certainty.value,
            "witness": None if self.witness is None else [list(v) for v in self.witness],
            "detail": self.detail,
        }


@dataclass
class NearlyOpenReport:
    mode: str
    verdicts: List[TraceVerdict]

    @property
    def status(self) -> Status:
        if any(v.status == Status.NOT_OPEN for v in self.verdicts):
            return Status.NOT_OPEN
        if all(v.status == Status.PASS for v in self.verdicts):
            return Status.PASS
        return Status.INCONCLUSIVE

    @property
    def first_failure(self) -> Optional[TraceVerdict]:
        rejected = next((v for v in self.verdicts if v.status == Status.NOT_OPEN), None)
        return rejected or next((v for v in self.verdicts if v.status != Status.PASS), None)

    def to_dict(self) -> Dict[str, Any]:
        return {"mode": self.mode, "status": self.status.value, "verdicts": [v.to_dict() for v in self.verdicts]}
