"""
Desk-scale verification suite: the properties the constructions are built to
satisfy, checked on seeded random instances.

Each check returns a CheckReport; the suite never raises for a failing
property, only records it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from src.analysis.continuity import s_continuity_check, ssc_check
from src.analysis.criterion import criterion_check_3_9
from src.analysis.nearly_open import nearly_open_trace_check
from src.analysis.oracles import brute_force_set_distance, escape_region_complement, trace_complement
from src.analysis.oscillation import claim1_bound_check, claim3_witness, claim4_check, oscillation_estimate
from src.analysis.reports import CheckReport
from src.analysis.sampling import (
    NetSpec,
    random_ball_product,
    random_point,
    random_union,
    same_component_pairs,
    sample_box,
    sample_closed_product,
    sample_in_ball_product,
    sample_stable_escape,
)
from src.constructions.ball_product import Radii
from src.constructions.functions import build_thm52, build_thm53, component_indicator, coordinate_function, evaluate_g
from src.constructions.radii import radii_extension
from src.sigma.errors import SigmaError
from src.sigma.space import ZERO_ANCHOR, BoxNeighborhood, NormKind, SigmaSpace, SpaceFamily
from src.sigma.topology import (
    box_predicate,
    complement_closure_check,
    component_union,
    coordinated_limit_check,
    density_witness,
    fresh_anchor,
    projective_symmetry_check,
    s_open_probe,
)
from src.sigma.traces import trace_of_ball_product, trace_of_point
from src.sigma.verdicts import Certainty, Status
from src.utils.config import get_settings
from src.utils.config_loader import default
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

GRID_STEP = 0.01
CONTINUITY_TOL = 1e-2
# Points of W are drawn with transformed norms <= 0.8, so every escape distance is >= 0.2.
INSIDE_FILL = 0.8


@dataclass(frozen=True)
class SuiteSizes:
    """
    Case counts per check.

    The defaults and settings.yaml trade coverage for a run of well under
    two minutes. `acceptance()` gives the full desk-scale counts (10^4
    Lipschitz triples over 20 ball products, 100 points per ball product,
    and so on); the checks run one after another on one core, so a full run
    takes about three minutes. Use it from the CLI with `verify --full`.
    """
    claim2_samples: int = 50
    claim1_triples: int = 1000
    claim1_ball_products: int = 5
    ball_products: int = 4
    points_per_ball_product: int = 10
    unions: int = 3
    indicator_points: int = 10
    criterion_points: int = 4
    topology_pairs: int = 25

    @classmethod
    def from_config(cls) -> "SuiteSizes":
        return cls(**{name: int(default(f"verify.{name}", value)) for name, value in cls().__dict__.items()})

    @classmethod
    def acceptance(cls) -> "SuiteSizes":
        return cls(claim2_samples=500, claim1_triples=10_000, claim1_ball_products=20, ball_products=20,
                   points_per_ball_product=100, unions=10, indicator_points=50, criterion_points=20,
                   topology_pairs=100)


def _report(check: str, failures: List[str], metric: float, checked: int,
            certainty: Certainty = Certainty.EVIDENCE) -> CheckReport:
    status = Status.FAIL if failures else Status.PASS
    detail = f"{checked} cases" + (f"; first failure: {failures[0]}" if failures else "")
    return CheckReport(check, status, certainty, metric, detail=detail)


def _random_family(rng: np.random.Generator, max_dim: int = 3) -> SpaceFamily:
    kinds = list(NormKind)
    return SpaceFamily.uniform(int(rng.integers(1, max_dim + 1)), kinds[int(rng.integers(0, len(kinds)))])


def _small_net(seed: int) -> NetSpec:
    return NetSpec.from_config(seed=seed, samples=16)


# Individual checks

def check_distance_oracle(rng: np.random.Generator, sizes: SuiteSizes) -> CheckReport:
    """Closed-form g on the escape region against the grid distance to its complement."""
    failures, worst = [], 0.0
    kinds = list(NormKind)
    for j in range(sizes.claim2_samples):
        n = 1 + (j // len(kinds)) % 3
        family = SpaceFamily.uniform(1, kinds[j % len(kinds)])
        space = SigmaSpace(family)
        coords = [float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 0.99)) for _ in range(n - 1)]
        coords.append(float(rng.choice([-1.0, 1.0]) * rng.uniform(1.0, 1.5)))
        z = space.point(ZERO_ANCHOR, {i: [c] for i, c in enumerate(coords, start=1)})
        exact = evaluate_g(space, z)
        brute = brute_force_set_distance(family, n, [[c] for c in coords], escape_region_complement(family, n),
                                         step=GRID_STEP)
        err = abs(exact - brute)
        worst = max(worst, err)
        if err > 2 * GRID_STEP:
            failures.append(f"u={coords}: closed form {exact:.6g}, grid {brute:.6g}")
    return _report("distance_oracle", failures, worst, sizes.claim2_samples)


def check_lipschitz_bound(rng: np.random.Generator, sizes: SuiteSizes) -> CheckReport:
    """|g(h(x)) - g(h(x_k^u))| <= 2 ||h(x)_k - h(u)_k|| on random triples."""
    failures, least = [], np.inf
    per = max(sizes.claim1_triples // sizes.claim1_ball_products, 1)
    for _ in range(sizes.claim1_ball_products):
        space = SigmaSpace(_random_family(rng))
        f = build_thm52(space, random_ball_product(space, rng))
        for _ in range(per):
            x = random_point(space, ZERO_ANCHOR, rng, max_index=5, scale=3.0)
            u = random_point(space, ZERO_ANCHOR, rng, max_index=5, scale=3.0)
            k = int(rng.integers(1, 7))
            slack = claim1_bound_check(f, x, u, k)
            least = min(least, slack)
            if slack < 0:
                failures.append(f"k={k}, slack {slack:.3g}")
    return _report("lipschitz_bound", failures, float(least), per * sizes.claim1_ball_products)


def check_single_ball_product(rng: np.random.Generator, sizes: SuiteSizes, seed: int) -> CheckReport:
    """Zero on W, escape witnesses of value rho, continuity boxes off the closure."""
    failures, checked = [], 0
    slack = default("tolerances.witness_slack", 1e-9)
    net = _small_net(seed)
    for b in range(sizes.ball_products):
        space = SigmaSpace(_random_family(rng))
        f = build_thm52(space, random_ball_product(space, rng))
        for _ in range(sizes.points_per_ball_product):
            checked += 1
            x = sample_in_ball_product(space, f.bp, rng, max_index=3, fill=INSIDE_FILL)
            if f.evaluate(x) != 0.0:
                failures.append(f"ball product {b}: f={f.evaluate(x)!r} inside W")
                continue
            rho, _ = f.escape_rho(x)
            if abs(f.evaluate(claim3_witness(f, x, 1)) - rho) > slack:
                failures.append(f"ball product {b}: witness value differs from rho={rho:.6g}")
            estimate = oscillation_estimate(f, x, net, CONTINUITY_TOL)
            if estimate.certified_lower < rho - slack:
                failures.append(f"ball product {b}: oscillation bound {estimate.certified_lower:.6g} < rho")
            u = sample_stable_escape(space, [f], rng)
            box_check = claim4_check(f, u, CONTINUITY_TOL, samples=100, seed=seed, net=net)
            if not box_check.passed:
                failures.append(f"ball product {b}: {box_check.detail}")
    return _report("single_ball_product", failures, float(len(failures)), checked)


def check_weighted_union(rng: np.random.Generator, sizes: SuiteSizes, seed: int) -> CheckReport:
    """Discontinuous on each W_m, continuous off the closures, partial sums within 2^-M'."""
    failures, checked = [], 0
    net = NetSpec.from_config(seed=seed, samples=16)
    for k in range(sizes.unions):
        space = SigmaSpace(_random_family(rng))
        union = random_union(space, rng, int(rng.integers(1, 5)))
        f = build_thm53(space, union)
        points = []
        for bp in union.members:
            x = sample_in_ball_product(space, bp, rng, max_index=3, fill=INSIDE_FILL)
            points.append(x)
            estimate = oscillation_estimate(f, x, net, CONTINUITY_TOL)
            if estimate.verdict != Status.DISCONTINUOUS:
                failures.append(f"union {k}: point of a member judged {estimate.verdict.value}")
        u = sample_stable_escape(space, f.parts, rng)
        points.append(u)
        estimate = oscillation_estimate(f, u, net, CONTINUITY_TOL)
        if estimate.verdict != Status.LIKELY_CONTINUOUS:
            failures.append(f"union {k}: point off the closures judged {estimate.verdict.value}")
        for x in points:
            checked += 1
            total = f.evaluate(x)
            for terms in range(len(union) + 1):
                if abs(total - f.partial_sum(x, terms)) > 2.0 ** -terms:
                    failures.append(f"union {k}: truncation after {terms} terms exceeds 2^-{terms}")
    return _report("weighted_union", failures, float(len(failures)), checked)


def check_nearly_open(rng: np.random.Generator, sizes: SuiteSizes) -> CheckReport:
    """Claimed sets are nearly open, singletons and closed balls are not, radii halve as expected."""
    failures, checked = [], 0
    for b in range(sizes.ball_products):
        space = SigmaSpace(_random_family(rng))
        bp = random_ball_product(space, rng)
        union = random_union(space, rng, int(rng.integers(1, 5)))
        checked += 4
        if nearly_open_trace_check(bp.traces(space), 4).status != Status.PASS:
            failures.append(f"case {b}: ball product traces not open")
        if nearly_open_trace_check(union.traces(space), 4).status != Status.PASS:
            failures.append(f"case {b}: union traces not open")
        single = trace_of_point(space, random_point(space, ZERO_ANCHOR, rng, max_index=3))
        if nearly_open_trace_check(single, 4).status != Status.NOT_OPEN:
            failures.append(f"case {b}: singleton accepted")
        closed = trace_of_ball_product(space, bp.center, bp.radii, closed=True)
        if nearly_open_trace_check(closed, 4).status != Status.NOT_OPEN:
            failures.append(f"case {b}: closed ball accepted")

    space = SigmaSpace(SpaceFamily.uniform(1))
    cube = trace_of_ball_product(space, space.base_point(ZERO_ANCHOR), Radii.constant(1.0), name="cube")
    radii = radii_extension(cube, space.base_point(ZERO_ANCHOR), 3)
    if radii != [0.5, 0.25, 0.125]:
        failures.append(f"cube radii {radii}")
    worst = 0.0
    norms = space.family.spaces(3)
    for n in range(1, 4):
        # The stage-n closed product: B[0, r_i] for i < n, {0} at n.
        stage_radii = radii[:n - 1] + [0.0]
        margin = min(brute_force_set_distance(space.family, n, z, trace_complement(cube, n), step=GRID_STEP)
                     for z in sample_closed_product([(0.0,)] * n, stage_radii, norms[:n], rng, 3))
        expected = 1.0 if n == 1 else 0.5
        worst = max(worst, abs(margin - expected))
        if abs(margin - expected) > 2 * GRID_STEP:
            failures.append(f"cube margin at n={n}: grid {margin:.6g}, expected {expected}")
    checked += 3
    return _report("nearly_open", failures, worst, checked)


def check_component_indicator(rng: np.random.Generator, sizes: SuiteSizes, seed: int) -> CheckReport:
    """SSC everywhere with zero differences, oscillation 1 everywhere."""
    failures = []
    space = SigmaSpace(_random_family(rng))
    other = fresh_anchor(space)
    f = component_indicator(space, space.base_point(ZERO_ANCHOR), 0.0, 1.0)
    net = _small_net(seed)
    points = [random_point(space, ZERO_ANCHOR if j % 2 == 0 else other, rng)
              for j in range(sizes.indicator_points)]
    for x in points:
        t = int(rng.integers(1, 5))
        ssc = ssc_check(f, x, t, net)
        if ssc.metric != 0.0:
            failures.append(f"ssc difference {ssc.metric!r} at t={t}")
        estimate = oscillation_estimate(f, x, net, CONTINUITY_TOL)
        if estimate.certified_lower != 1.0:
            failures.append(f"oscillation bound {estimate.certified_lower!r}")
    scont = s_continuity_check(f, same_component_pairs(space, points, rng))
    if not scont.passed:
        failures.append(scont.detail)
    return _report("component_indicator", failures, float(len(failures)), len(points))


def check_criterion(rng: np.random.Generator, sizes: SuiteSizes, seed: int) -> CheckReport:
    """FOUND for finite-coordinate and off-closure points, NOT_FOUND for the everywhere-discontinuous."""
    failures, checked = [], 0
    space = SigmaSpace(_random_family(rng))
    profiles = [("norm", (1,)), ("sum_norms", (1, 2)), ("product", (1, 2)), ("max_norm", (2, 3)),
                ("sum_norms", (1, 2, 3))]
    for profile, indices in profiles:
        f = coordinate_function(space, profile, indices)
        for _ in range(sizes.criterion_points):
            checked += 1
            a = random_point(space, ZERO_ANCHOR, rng)
            result = criterion_check_3_9(f, a, CONTINUITY_TOL, seed=seed)
            if not result.found or not set(result.T0) <= set(indices):
                failures.append(f"{profile}{indices}: {result.status.value} T0={result.T0}")

    f = build_thm52(space, random_ball_product(space, rng))
    indicator = component_indicator(space, space.base_point(ZERO_ANCHOR))
    for _ in range(sizes.criterion_points):
        checked += 3
        u = sample_stable_escape(space, [f], rng)
        if not criterion_check_3_9(f, u, CONTINUITY_TOL, seed=seed).found:
            failures.append("continuity point of a ball-product function: NOT_FOUND")
        x = sample_in_ball_product(space, f.bp, rng, max_index=3, fill=INSIDE_FILL)
        if criterion_check_3_9(f, x, CONTINUITY_TOL, seed=seed).found:
            failures.append("point of W: FOUND")
        if criterion_check_3_9(indicator, random_point(space, ZERO_ANCHOR, rng), CONTINUITY_TOL, seed=seed).found:
            failures.append("component indicator: FOUND")
    return _report("criterion", failures, float(len(failures)), checked)


def check_s_topology(rng: np.random.Generator, sizes: SuiteSizes, seed: int) -> CheckReport:
    """Component predicates, density witnesses, projective symmetry and coordinated limits of boxes."""
    failures, checked = [], 0
    space = SigmaSpace(_random_family(rng))
    other = fresh_anchor(space)
    sample = [random_point(space, anchor_id, rng) for anchor_id in (ZERO_ANCHOR, other) for _ in range(5)]
    A = component_union([ZERO_ANCHOR])
    for verdict in (s_open_probe(space, A, sample), s_open_probe(space, A.negate(), sample),
                    complement_closure_check(space, A, sample)):
        checked += 1
        if not verdict.passed:
            failures.append(verdict.detail)

    net = _small_net(seed)
    for _ in range(sizes.topology_pairs):
        checked += 1
        anchor_id = [ZERO_ANCHOR, other][int(rng.integers(0, 2))]
        pred = component_union([anchor_id], complement=bool(rng.integers(0, 2)))
        center = random_point(space, [ZERO_ANCHOR, other][int(rng.integers(0, 2))], rng)
        U = BoxNeighborhood.around(center, float(rng.uniform(0.1, 1.0)), int(rng.integers(1, 5)))
        try:
            density_witness(space, pred, U)
        except SigmaError as e:
            failures.append(f"density: {e}")

        box_sample = sample_box(space, None, center, U, rng, net.samples, net.probe_magnitudes)
        symmetric = projective_symmetry_check(space, box_predicate(space, U), center, box_sample)
        if not symmetric.passed:
            failures.append(symmetric.detail)
        t = int(rng.integers(1, U.horizon + 2))
        limit = coordinated_limit_check(space, center, t, U, seed=seed)
        if limit.status != Status.PASS:
            failures.append(limit.detail)
    return _report("s_topology", failures, float(len(failures)), checked)


# Suite

SuiteCheck = Callable[[np.random.Generator, SuiteSizes, int], CheckReport]

SUITE: Sequence[Tuple[str, SuiteCheck]] = (
    ("distance_oracle", lambda rng, sizes, seed: check_distance_oracle(rng, sizes)),
    ("lipschitz_bound", lambda rng, sizes, seed: check_lipschitz_bound(rng, sizes)),
    ("single_ball_product", check_single_ball_product),
    ("weighted_union", check_weighted_union),
    ("nearly_open", lambda rng, sizes, seed: check_nearly_open(rng, sizes)),
    ("component_indicator", check_component_indicator),
    ("criterion", check_criterion),
    ("s_topology", check_s_topology),
)


def run_verification_suite(seed: Optional[int] = None, sizes: Optional[SuiteSizes] = None,
                           only: Optional[Sequence[str]] = None) -> List[CheckReport]:
    """
    Run the suite; every check draws from its own generator seeded by
    (seed, position), so results do not depend on which checks run.
    """
    seed = get_settings().DEFAULT_SEED if seed is None else seed
    sizes = sizes or SuiteSizes.from_config()
    reports = []
    for position, (name, check) in enumerate(tqdm(SUITE, desc="verify", disable=None)):
        if only and name not in only:
            continue
        rng = np.random.default_rng([seed, position])
        try:
            report = check(rng, sizes, seed)
        except (SigmaError, ValueError) as e:
            logger.error(f"Check {name} raised: {e}")
            report = CheckReport(name, Status.ERROR, detail=f"{type(e).__name__}: {e}")
        logger.info(f"{name}: {report.status.value} ({report.detail})")
        reports.append(report)
    return reports
