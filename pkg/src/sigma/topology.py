"""
S-topology predicates on sigma-products.

A set is S-open when every single-coordinate change of a member stays in the
set; the S-components are exactly the sigma-products sigma(x), modelled here
by anchor labels. S-openness of a general predicate can only be probed, so
probe verdicts distinguish EVIDENCE (sampled) from CERTIFIED (exact witness or
structural description).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.sigma.errors import PreconditionError, SigmaError
from src.sigma.space import Anchor, BoxNeighborhood, SigmaSpace, SparsePoint, random_unit_vector
from src.sigma.traces import TraceFamily
from src.sigma.verdicts import Certainty, Status
from src.utils.config_loader import default
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


class PredicateTag(str, Enum):
    """Structural description attached to a set predicate."""
    BALL_PRODUCT_UNION = "BALL_PRODUCT_UNION"
    COMPONENT_UNION = "COMPONENT_UNION"
    BLACK_BOX = "BLACK_BOX"


@dataclass(frozen=True)
class SetPredicate:
    """
    Membership test for a subset A of the product.

    COMPONENT_UNION predicates carry the anchor ids of their components; with
    `complement` set they describe every other component instead. Predicates
    built from ball products may carry their analytic traces.
    """
    test: Callable[[SparsePoint], bool]
    tag: PredicateTag = PredicateTag.BLACK_BOX
    components: Optional[FrozenSet[str]] = None
    complement: bool = False
    traces: Optional[TraceFamily] = None
    name: str = ""

    def __call__(self, x: SparsePoint) -> bool:
        return bool(self.test(x))

    def negate(self) -> "SetPredicate":
        """The complement X \\ A. Complements of component unions stay component unions."""
        if self.tag == PredicateTag.COMPONENT_UNION:
            return component_union(self.components, complement=not self.complement,
                                   name=f"not({self.name})")
        return SetPredicate(lambda x: not self.test(x), PredicateTag.BLACK_BOX,
                            complement=not self.complement, name=f"not({self.name})")

    def describe(self) -> str:
        return self.name or self.tag.value


def component_union(anchor_ids: Iterable[str], complement: bool = False, name: str = "") -> SetPredicate:
    """Union of the sigma-components with the given anchors (or of all the others)."""
    components = frozenset(anchor_ids)

    def test(x: SparsePoint) -> bool:
        return (x.anchor_id in components) != complement

    label = name or ("sigma(" + ",".join(sorted(components)) + ")")
    return SetPredicate(test, PredicateTag.COMPONENT_UNION, components, complement, name=label)


def ball_product_union(test: Callable[[SparsePoint], bool], traces: Optional[TraceFamily] = None,
                       name: str = "") -> SetPredicate:
    """Predicate of a finite union of ball products inside one sigma(a)."""
    return SetPredicate(test, PredicateTag.BALL_PRODUCT_UNION, traces=traces, name=name)


def box_predicate(space: SigmaSpace, U: BoxNeighborhood, name: str = "box") -> SetPredicate:
    return SetPredicate(lambda x: space.box_contains(U, x), name=name)


def whole_space() -> SetPredicate:
    return SetPredicate(lambda x: True, name="whole")


def empty_set() -> SetPredicate:
    return SetPredicate(lambda x: False, name="empty")


def black_box(test: Callable[[SparsePoint], bool], name: str = "black-box") -> SetPredicate:
    return SetPredicate(test, name=name)


@dataclass(frozen=True)
class MutationProbe:
    """Seeded single-coordinate mutation schedule."""
    seed: int = 7
    per_point_mutations: int = 8
    magnitudes: Tuple[float, ...] = (1e-3, 1e-1, 1.0, 10.0, 1e3)

    def __post_init__(self):
        object.__setattr__(self, "magnitudes", tuple(float(m) for m in self.magnitudes))
        if self.per_point_mutations < 1:
            raise ValueError("per_point_mutations must be at least 1")
        if not self.magnitudes or min(self.magnitudes) <= 0:
            raise ValueError("Mutation magnitudes must be a nonempty list of positive reals")

    @classmethod
    def from_config(cls, seed: Optional[int] = None) -> "MutationProbe":
        """Probe with the defaults of config/settings.yaml."""
        return cls(
            seed=default("mutation_probe.seed", 7) if seed is None else seed,
            per_point_mutations=default("mutation_probe.per_point_mutations", 8),
            magnitudes=tuple(default("mutation_probe.magnitudes", [1e-3, 1e-1, 1.0, 10.0, 1e3])),
        )


@dataclass
class ProbeVerdict:
    """Result of a probing check."""
    status: Status
    certainty: Certainty
    witness: Optional[Tuple[SparsePoint, SparsePoint]] = None
    checked: int = 0
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == Status.PASS

    def to_dict(self) -> Dict:
        return {
            "status": self.status.value,
            "certainty": self.certainty.value,
            "witness": None if self.witness is None else [w.as_dict() for w in self.witness],
            "checked": self.checked,
            "detail": self.detail,
        }


@dataclass
class LimitVerdict:
    """Radius found for the coordinated limit a_t^x -> a inside a target box."""
    status: Status
    delta: Optional[float]
    analytic_delta: float
    vacuous: bool
    probes: int = 0
    detail: str = ""

    def to_dict(self) -> Dict:
        return {
            "status": self.status.value,
            "delta": self.delta,
            "analytic_delta": self.analytic_delta,
            "vacuous": self.vacuous,
            "probes": self.probes,
            "detail": self.detail,
        }


def _probe_indices(x: SparsePoint, extra: Iterable[int], probe: MutationProbe,
                   rng: np.random.Generator) -> List[int]:
    """Support of x, index 1, and random indices on both sides of the support."""
    upper = max(x.max_index, 1) + probe.per_point_mutations
    draws = rng.choice(np.arange(1, upper + 1), size=min(probe.per_point_mutations, upper), replace=False)
    return sorted(set(x.support) | {1} | set(int(t) for t in draws) | set(extra))


def _mutations(space: SigmaSpace, x: SparsePoint, t: int, probe: MutationProbe,
               rng: np.random.Generator) -> List[SparsePoint]:
    coord_space = space.family.space(t)
    current = np.asarray(space.coordinate(x, t))
    out = []
    for mag in probe.magnitudes:
        e = random_unit_vector(coord_space, rng)
        out.append(space.with_coordinate(x, t, mag * e))
        out.append(space.with_coordinate(x, t, current + mag * e))
    return out


def s_open_probe(space: SigmaSpace, A: SetPredicate, sample: Sequence[SparsePoint],
                 probe: Optional[MutationProbe] = None) -> ProbeVerdict:
    """
    Probe sigma_1(x) inside A for every sampled member x of A.

    Returns COUNTEREXAMPLE(x, y) for the first mutation y that leaves A.
    PASS is evidence only, except for component unions.
    """
    if not sample:
        raise PreconditionError("s_open_probe needs a nonempty sample")
    probe = probe or MutationProbe.from_config()
    rng = np.random.default_rng(probe.seed)
    checked = 0
    for x in sample:
        if not A(x):
            continue
        for t in _probe_indices(x, (), probe, rng):
            for y in _mutations(space, x, t, probe, rng):
                checked += 1
                if not A(y):
                    logger.debug(f"{A.describe()}: mutation at index {t} leaves the set")
                    return ProbeVerdict(Status.COUNTEREXAMPLE, Certainty.CERTIFIED, (x, y), checked,
                                        f"single-coordinate change at index {t} leaves {A.describe()}")
    certainty = Certainty.CERTIFIED if A.tag == PredicateTag.COMPONENT_UNION else Certainty.EVIDENCE
    return ProbeVerdict(Status.PASS, certainty, None, checked, f"{checked} mutations stayed inside")


def complement_closure_check(space: SigmaSpace, A: SetPredicate, sample: Sequence[SparsePoint],
                             probe: Optional[MutationProbe] = None) -> ProbeVerdict:
    """
    Probe A and its complement. The check passes when both probes agree:
    both PASS, or both find counterexamples that stay inside one component.
    """
    direct = s_open_probe(space, A, sample, probe)
    negated = s_open_probe(space, A.negate(), sample, probe)
    checked = direct.checked + negated.checked
    detail = f"A: {direct.status.value}, complement: {negated.status.value}"

    if direct.passed and negated.passed:
        certainty = Certainty.CERTIFIED if A.tag == PredicateTag.COMPONENT_UNION else Certainty.EVIDENCE
        return ProbeVerdict(Status.PASS, certainty, None, checked, detail)

    if not direct.passed and not negated.passed:
        for verdict in (direct, negated):
            x, y = verdict.witness
            if not space.same_component(x, y):
                return ProbeVerdict(Status.COUNTEREXAMPLE, Certainty.CERTIFIED, verdict.witness, checked,
                                    detail + "; counterexample crosses components")
        return ProbeVerdict(Status.PASS, Certainty.CERTIFIED, None, checked, detail)

    failing = direct if not direct.passed else negated
    logger.debug(f"Complement closure disagrees for {A.describe()}: {detail}")
    return ProbeVerdict(Status.COUNTEREXAMPLE, Certainty.EVIDENCE, failing.witness, checked, detail)


def component_partition(space: SigmaSpace, points: Sequence[SparsePoint]) -> List[List[SparsePoint]]:
    """Group points by sigma-component, groups in order of first appearance."""
    groups: Dict[str, List[SparsePoint]] = {}
    for x in points:
        groups.setdefault(x.anchor_id, []).append(x)
    return list(groups.values())


def projective_symmetry_check(space: SigmaSpace, A: SetPredicate, a: SparsePoint,
                              sample: Sequence[SparsePoint],
                              probe: Optional[MutationProbe] = None) -> ProbeVerdict:
    """Check x_t^a = splice(x, {t}, a) stays in A for sampled x in A and indices t."""
    probe = probe or MutationProbe.from_config()
    rng = np.random.default_rng(probe.seed)
    a_indices = set(a.support) | set(space.anchor(a.anchor_id).indices)
    checked = 0
    for x in sample:
        if not A(x):
            continue
        for t in _probe_indices(x, a_indices, probe, rng):
            y = space.splice(x, (t,), a)
            checked += 1
            if not A(y):
                return ProbeVerdict(Status.COUNTEREXAMPLE, Certainty.CERTIFIED, (x, y), checked,
                                    f"replacing coordinate {t} by the base point's leaves {A.describe()}")
    return ProbeVerdict(Status.PASS, Certainty.EVIDENCE, None, checked, f"{checked} splices stayed inside")


def coordinated_limit_check(space: SigmaSpace, a: SparsePoint, t: int, box: BoxNeighborhood,
                            radius_grid: Optional[Sequence[float]] = None,
                            probes: Optional[int] = None, seed: Optional[int] = None) -> LimitVerdict:
    """
    Largest grid radius delta such that every probed v with ||v - a_t|| < delta
    keeps the point a_t^v inside the box. The analytic answer is the slack of
    the box at t, or infinite when t is unconstrained.
    """
    if not space.box_contains(box, a):
        raise PreconditionError("The target box must contain the base point")
    grid = sorted(radius_grid or default("coordinated_limit.radius_grid",
                                         [10.0, 3.0, 1.0, 0.5, 0.3, 0.1, 0.03, 0.01, 0.001]), reverse=True)
    probes = probes or default("coordinated_limit.probes_per_radius", 16)
    rng = np.random.default_rng(default("mutation_probe.seed", 7) if seed is None else seed)
    coord_space = space.family.space(t)
    a_t = np.asarray(space.coordinate(a, t))

    r_t = box.radius(t)
    vacuous = r_t is None
    analytic = float("inf") if vacuous else r_t - space.coordinate_distance(a, box.center, t)

    # Fractions of delta: the near-boundary ones decide the grid step.
    fractions = np.concatenate([[0.0, 0.5, 1.0 - 1e-9], rng.uniform(0.0, 1.0, max(probes - 3, 0))])
    total = 0
    for delta in grid:
        ok = True
        for s in fractions:
            v = a_t + s * delta * random_unit_vector(coord_space, rng)
            total += 1
            if not space.box_contains(box, space.with_coordinate(a, t, v)):
                ok = False
                break
        if ok:
            return LimitVerdict(Status.PASS, float(delta), analytic, vacuous, total,
                                f"delta={delta:g} on the grid, analytic {analytic:g}")
    logger.warning(f"No grid radius keeps a_t^v inside the box at index {t}")
    return LimitVerdict(Status.FAIL, None, analytic, vacuous, total, "no grid radius qualifies")


def density_witness(space: SigmaSpace, A: SetPredicate, U: BoxNeighborhood) -> SparsePoint:
    """
    A point of the component union A inside the box U: a representative of A
    with its constrained coordinates spliced to U's center.
    """
    if A.tag != PredicateTag.COMPONENT_UNION:
        raise PreconditionError("Density witnesses are constructed for component unions only")
    if A.complement:
        candidates = [k for k in space.anchor_ids if k not in A.components]
        if candidates:
            anchor_id = candidates[0]
        else:
            anchor_id = fresh_anchor(space, A.components)
    else:
        if not A.components:
            raise PreconditionError("The empty union has no points")
        anchor_id = sorted(A.components)[0]
        space.anchor(anchor_id)
    witness = space.splice(space.base_point(anchor_id), U.indices, U.center)
    if not (A(witness) and space.box_contains(U, witness)):
        raise SigmaError(f"Density construction failed for {A.describe()}")
    return witness


def fresh_anchor(space: SigmaSpace, taken: Iterable[str] = ()) -> str:
    """Register a new anchor one unit away from zero at index 1."""
    taken = set(taken) | set(space.anchor_ids)
    k = 1
    while f"other-{k}" in taken:
        k += 1
    anchor_id = f"other-{k}"
    tail = space.family.space(1)
    space.register_anchor(Anchor(anchor_id, {1: (1.0,) + (0.0,) * (tail.dim - 1)}))
    return anchor_id
