"""
Sampled continuity checks: strong separate continuity, separate continuity,
S-continuity and lower semicontinuity.
"""
from typing import Optional, Sequence, Tuple

import numpy as np

from src.analysis.reports import CheckReport
from src.analysis.sampling import NetSpec, sample_box
from src.constructions.functions import ConstructedFunction
from src.sigma.space import SparsePoint, random_unit_vector
from src.sigma.verdicts import Certainty, Status
from src.utils.config_loader import default
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_LINE_GRID = (1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


def _tolerance(tol: Optional[float]) -> float:
    return default("tolerances.continuity", 1e-2) if tol is None else tol


def ssc_check(f: ConstructedFunction, u: SparsePoint, t: int, net: Optional[NetSpec] = None,
              tol: Optional[float] = None) -> CheckReport:
    """
    Strong separate continuity at u with respect to t.

    Level j samples x in the j-th box around u (index t always constrained)
    and records s_j = max |f(x) - f(x_t^u)|. PASS when the last s_j < tol.
    """
    net = net or NetSpec.from_config()
    tol = _tolerance(tol)
    rng = np.random.default_rng(net.seed)
    space = f.space
    sequence = []
    worst_pair = None
    for level in range(net.levels):
        box = net.box(u, level, extra=(t,))
        s = 0.0
        for x in sample_box(space, f, u, box, rng, net.samples, net.probe_magnitudes, net.unconstrained_spread):
            y = space.splice(x, (t,), u)
            d = abs(f.evaluate(x) - f.evaluate(y))
            if d > s:
                s, worst_pair = d, (x, y)
        sequence.append(s)
    status = Status.PASS if sequence[-1] < tol else Status.FAIL
    if status == Status.FAIL:
        logger.debug(f"{f.name}: strong separate continuity fails at index {t} ({sequence[-1]:g} >= {tol:g})")
    return CheckReport("ssc", status, Certainty.EVIDENCE, sequence[-1], sequence,
                       worst_pair if status == Status.FAIL else None,
                       f"t={t}, final level difference {sequence[-1]:.3g}")


def separate_continuity_check(f: ConstructedFunction, u: SparsePoint, t: int,
                              grid: Sequence[float] = DEFAULT_LINE_GRID, tol: Optional[float] = None,
                              directions: int = 8, seed: int = 0) -> CheckReport:
    """
    Continuity of s -> f(u_t^s) at s = u_t: values on spheres of shrinking
    radius around u_t must approach f(u).
    """
    tol = _tolerance(tol)
    rng = np.random.default_rng(seed)
    space = f.space
    coord_space = space.family.space(t)
    center = np.asarray(space.coordinate(u, t))
    fu = f.evaluate(u)
    sequence = []
    for delta in grid:
        dev = 0.0
        for _ in range(directions):
            v = center + delta * random_unit_vector(coord_space, rng)
            dev = max(dev, abs(f.evaluate(space.with_coordinate(u, t, v)) - fu))
        sequence.append(dev)
    status = Status.PASS if sequence[-1] < tol else Status.FAIL
    return CheckReport("separate", status, Certainty.EVIDENCE, sequence[-1], sequence,
                       detail=f"t={t}, deviation {sequence[-1]:.3g} at radius {grid[-1]:g}")


def s_continuity_check(f: ConstructedFunction, pairs: Sequence[Tuple[SparsePoint, SparsePoint]]) -> CheckReport:
    """
    f is continuous for the S-topology iff it is constant on every
    S-component: every sampled same-component pair must have equal values.
    """
    space = f.space
    checked = 0
    for x, y in pairs:
        if not space.same_component(x, y):
            continue
        checked += 1
        fx, fy = f.evaluate(x), f.evaluate(y)
        if fx != fy:
            return CheckReport("scont", Status.FAIL, Certainty.CERTIFIED, abs(fx - fy), witness=(x, y),
                               detail=f"values {fx:g} and {fy:g} inside one component")
    return CheckReport("scont", Status.PASS, Certainty.EVIDENCE, 0.0,
                       detail=f"{checked} same-component pairs agree")


def lower_semicontinuity_check(f: ConstructedFunction, u: SparsePoint, net: Optional[NetSpec] = None,
                               tol: Optional[float] = None) -> CheckReport:
    """
    Sampled liminf at u: the minimum of f over each box level must not drop
    below f(u) - tol at the deepest level.
    """
    net = net or NetSpec.from_config()
    tol = _tolerance(tol)
    rng = np.random.default_rng(net.seed)
    fu = f.evaluate(u)
    sequence = []
    lowest = None
    for level in range(net.levels):
        box = net.box(u, level)
        low, arg = fu, None
        for x in sample_box(f.space, f, u, box, rng, net.samples, net.probe_magnitudes, net.unconstrained_spread):
            v = f.evaluate(x)
            if v < low:
                low, arg = v, x
        sequence.append(low)
        lowest = arg if arg is not None else lowest
    drop = fu - sequence[-1]
    status = Status.PASS if drop <= tol else Status.FAIL
    return CheckReport("lsc", status, Certainty.EVIDENCE, drop, sequence,
                       None if status == Status.PASS or lowest is None else (u, lowest),
                       f"f(u)={fu:.6g}, deepest minimum {sequence[-1]:.6g}")
