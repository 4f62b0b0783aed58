"""
Oscillation estimates and the pointwise claims behind the single ball-product
construction: escape witnesses inside W, continuity boxes outside it and the
Lipschitz bound for one-coordinate changes.
"""
from typing import List, Optional

import numpy as np

from src.analysis.reports import CheckReport, OscillationEstimate
from src.analysis.sampling import NetSpec, sample_box
from src.constructions.functions import ConstructedFunction, Thm52Function, classify_region, evaluate_g
from src.sigma.errors import PreconditionError
from src.sigma.space import BoxNeighborhood, SparsePoint
from src.sigma.verdicts import Certainty, Status
from src.utils.config_loader import default
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


def oscillation_estimate(f: ConstructedFunction, u: SparsePoint, net: Optional[NetSpec] = None,
                         tol: Optional[float] = None) -> OscillationEstimate:
    """
    Estimate omega_f(u) over the net of shrinking boxes around u.

    Each level's lower bound is the largest |f(x') - f(x'')| over exactly
    evaluated points of the box (the function's witnesses and the samples);
    certified_lower is the minimum over levels. sampled_upper[j] is the
    spread of every sample from level j on, so it never increases.
    """
    net = net or NetSpec.from_config()
    tol = default("tolerances.continuity", 1e-2) if tol is None else tol
    rng = np.random.default_rng(net.seed)
    space = f.space
    fu = f.evaluate(u)

    level_lower: List[float] = []
    level_values: List[List[float]] = []
    pairs = []
    for level in range(net.levels):
        box = net.box(u, level)
        points = [x for x in f.witnesses(u, box) if space.box_contains(box, x)]
        points += sample_box(space, f, u, box, rng, net.samples, net.probe_magnitudes, net.unconstrained_spread)
        values = [fu] + [f.evaluate(x) for x in points]
        hi, lo = int(np.argmax(values)), int(np.argmin(values))
        spread = values[hi] - values[lo]
        level_lower.append(spread)
        level_values.append(values)
        everything = [u] + points
        pairs.append((everything[lo], everything[hi], spread))

    sampled_upper = []
    running_max, running_min = -np.inf, np.inf
    for values in reversed(level_values):
        running_max = max(running_max, max(values))
        running_min = min(running_min, min(values))
        sampled_upper.append(running_max - running_min)
    sampled_upper.reverse()

    certified = min(level_lower)
    if certified > tol:
        verdict = Status.DISCONTINUOUS
    elif sampled_upper[-1] < tol:
        verdict = Status.LIKELY_CONTINUOUS
    else:
        verdict = Status.INCONCLUSIVE
        logger.warning(f"{f.name}: oscillation inconclusive (lower {certified:.3g}, upper {sampled_upper[-1]:.3g})")
    return OscillationEstimate(u, certified, level_lower, sampled_upper, pairs, verdict, tol)


def claim3_witness(f: Thm52Function, u: SparsePoint, m: int) -> SparsePoint:
    """
    The point x^m: u with coordinate m+n moved to w + r(1 + rho)e, where n is
    the last support index of h(u). f(x^m) = rho while f(u) = 0, and x^m lies
    in every box around u that constrains only indices below m+n.
    """
    if not isinstance(f, Thm52Function):
        raise PreconditionError("Escape witnesses are defined for single ball-product functions")
    if f.evaluate(u) != 0.0:
        raise PreconditionError("Escape witnesses start from a zero of f")
    return f.escape_witness(u, m)


def claim4_neighborhood(f: Thm52Function, u: SparsePoint, eps: float) -> BoxNeighborhood:
    """
    A box around u, outside W, on which f stays within eps of f(u).

    With z = h(u) escaping at n: when ||z_n|| > 1 the transformed radii are
    min(eps, 1 - ||z_i||) for i < n and min(eps, ||z_n|| - 1) at n; when
    ||z_n|| = 1 they are 1 - ||z_i|| for i < n and eps at n. Radii are mapped
    back through h (multiplied by r_i).
    """
    if not eps > 0.0:
        raise PreconditionError(f"eps must be positive, got {eps}")
    space = f.space
    z = f.h(u)
    region = classify_region(space, z)
    if region.inside:
        raise PreconditionError("Continuity boxes are built outside the claimed set")
    if eps > 1.0:
        return BoxNeighborhood(u)
    n = region.escape
    norms = {i: space.family.space(i).norm(space.coordinate(z, i)) for i in range(1, n + 1)}
    on_sphere = norms[n] == 1.0
    constraints = {}
    for i in range(1, n):
        inner = 1.0 - norms[i]
        constraints[i] = f.bp.radii(i) * (inner if on_sphere else min(eps, inner))
    constraints[n] = f.bp.radii(n) * (eps if on_sphere else min(eps, norms[n] - 1.0))
    return BoxNeighborhood(u, constraints)


def claim4_check(f: Thm52Function, u: SparsePoint, eps: float, samples: int = 1000,
                 seed: int = 0, net: Optional[NetSpec] = None) -> CheckReport:
    """Sample the continuity box and report the largest deviation from f(u)."""
    net = net or NetSpec.from_config()
    box = claim4_neighborhood(f, u, eps)
    rng = np.random.default_rng(seed)
    fu = f.evaluate(u)
    worst, worst_x = 0.0, None
    for x in sample_box(f.space, f, u, box, rng, samples, net.probe_magnitudes, net.unconstrained_spread):
        d = abs(f.evaluate(x) - fu)
        if d > worst:
            worst, worst_x = d, x
    status = Status.PASS if worst < eps else Status.FAIL
    return CheckReport("claim4", status, Certainty.EVIDENCE, worst, [worst],
                       None if status == Status.PASS else (u, worst_x),
                       f"max deviation {worst:.3g} over {samples} points, eps {eps:g}")


def claim1_bound_check(f: Thm52Function, x: SparsePoint, u: SparsePoint, k: int,
                       slack: Optional[float] = None) -> float:
    """
    Slack of |g(h(x)) - g(h(x_k^u))| <= 2 ||h(x)_k - h(u)_k|| + slack.
    Negative values are violations.
    """
    slack = default("tolerances.witness_slack", 1e-9) if slack is None else slack
    space = f.space
    y = space.splice(x, (k,), u)
    hx, hy, hu = f.h(x), f.h(y), f.h(u)
    gap = abs(evaluate_g(space, hx) - evaluate_g(space, hy))
    step = space.family.space(k).norm(np.subtract(space.coordinate(hx, k), space.coordinate(hu, k)))
    return 2.0 * step + slack - gap
