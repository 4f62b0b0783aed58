"""
Task execution for scenes: one report record per task, CSV emission for
reports and 2-D slices.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.analysis.continuity import (
    lower_semicontinuity_check,
    s_continuity_check,
    separate_continuity_check,
    ssc_check,
)
from src.analysis.criterion import criterion_check_3_9
from src.analysis.nearly_open import TraceMode, nearly_open_trace_check
from src.analysis.oscillation import claim3_witness, claim4_check, oscillation_estimate
from src.analysis.sampling import NetSpec, random_point, same_component_pairs, sample_box
from src.constructions.ball_product import ball_product_from_radii
from src.constructions.functions import ConstructedFunction, Thm52Function
from src.constructions.radii import radii_extension
from src.sigma.errors import NotNearlyOpenError, PreconditionError, SigmaError
from src.sigma.space import BoxNeighborhood, SparsePoint
from src.sigma.topology import box_predicate, projective_symmetry_check
from src.sigma.traces import TraceFamily, trace_of_ball_product, trace_of_point, trace_of_predicate
from src.sigma.verdicts import Status, severity
from src.utils.config import get_settings
from src.utils.config_loader import default
from src.utils.logger import setup_logger

from src.cli.scene import Scene, TaskKind, TaskModel, build_scene
from src.cli.verify import run_verification_suite

logger = setup_logger(__name__)

REPORT_COLUMNS = ["index", "task", "kind", "status", "severity", "metric", "detail"]
SLICE_COLUMNS = ["i", "j", "c1", "c2", "value"]


@dataclass
class TaskRecord:
    index: int
    task: str
    kind: str
    status: Status
    metric: Optional[float] = None
    detail: str = ""

    @property
    def severity(self) -> int:
        return severity(self.status)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "task": self.task,
            "kind": self.kind,
            "status": self.status.value,
            "severity": self.severity,
            "metric": self.metric,
            "detail": self.detail,
        }


@dataclass
class ReportBundle:
    records: List[TaskRecord] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return max((r.severity for r in self.records), default=0)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.to_dict() for r in self.records], columns=REPORT_COLUMNS)

    def to_csv(self, out: Union[str, IO[str]]) -> None:
        write_csv(self.to_frame(), out)


def write_csv(frame: pd.DataFrame, out: Union[str, IO[str]]) -> None:
    """Comma-separated, header row, LF endings, 17 significant digits."""
    frame.to_csv(out, index=False, float_format="%.17g", lineterminator="\n")


# Task handlers

@dataclass
class TaskContext:
    scene: Scene
    task: TaskModel
    seed: int
    tol: float

    @property
    def f(self) -> ConstructedFunction:
        return self.scene.function(self.task.function)

    @property
    def u(self) -> SparsePoint:
        return self.scene.point(self.task.point)

    def param(self, key: str, fallback: Any = None) -> Any:
        return self.task.params.get(key, fallback)

    def net(self) -> NetSpec:
        overrides = {k: self.task.params[k] for k in ("levels", "samples", "shrink", "horizon_offset")
                     if k in self.task.params}
        return NetSpec.from_config(seed=self.seed, **overrides)


Outcome = Tuple[Status, Optional[float], str]
TASK_HANDLERS: Dict[TaskKind, Callable[[TaskContext], Outcome]] = {}


def handler(kind: TaskKind):
    def register(fn: Callable[[TaskContext], Outcome]):
        TASK_HANDLERS[kind] = fn
        return fn
    return register


def _fmt_point(x: SparsePoint) -> str:
    return json.dumps({"anchor": x.anchor_id, "overrides": {str(n): list(v) for n, v in x.overrides}})


@handler(TaskKind.EVAL)
def _eval(ctx: TaskContext) -> Outcome:
    value = ctx.f.evaluate(ctx.u)
    return Status.PASS, value, f"f={value!r}"


@handler(TaskKind.SSC)
def _ssc(ctx: TaskContext) -> Outcome:
    report = ssc_check(ctx.f, ctx.u, int(ctx.param("t", 1)), ctx.net(), ctx.tol)
    return report.status, report.metric, report.detail


@handler(TaskKind.SEP)
def _sep(ctx: TaskContext) -> Outcome:
    report = separate_continuity_check(ctx.f, ctx.u, int(ctx.param("t", 1)), tol=ctx.tol, seed=ctx.seed)
    return report.status, report.metric, report.detail


@handler(TaskKind.CRITERION)
def _criterion(ctx: TaskContext) -> Outcome:
    result = criterion_check_3_9(ctx.f, ctx.u, float(ctx.param("eps", ctx.tol)),
                                 horizon=ctx.param("horizon"), samples=ctx.param("samples"), seed=ctx.seed)
    if result.found:
        radii = sorted({r for _, r in result.box.constraints})
        return result.status, result.worst, f"T0={list(result.T0)}, box radii {radii or 'whole space'}"
    return result.status, None, f"budget {result.budget}, {result.tried} candidates"


@handler(TaskKind.SCONT)
def _scont(ctx: TaskContext) -> Outcome:
    rng = np.random.default_rng(ctx.seed)
    points = list(ctx.scene.points.values())
    for anchor_id in ctx.scene.space.anchor_ids:
        points += [random_point(ctx.scene.space, anchor_id, rng) for _ in range(int(ctx.param("count", 10)))]
    report = s_continuity_check(ctx.f, same_component_pairs(ctx.scene.space, points, rng))
    return report.status, report.metric, report.detail


def _named_traces(ctx: TaskContext) -> Tuple[TraceFamily, TraceMode]:
    which = ctx.param("set", "claimed")
    mode = TraceMode(ctx.param("mode", TraceMode.ANALYTIC.value))
    space = ctx.scene.space
    if which == "singleton":
        return trace_of_point(space, ctx.u), mode
    if which == "closed-ball":
        if not isinstance(ctx.f, Thm52Function):
            raise PreconditionError("Closed-ball traces are built from a single ball product")
        return trace_of_ball_product(space, ctx.f.bp.center, ctx.f.bp.radii, closed=True), mode
    claimed = ctx.f.claimed_discontinuities()
    if claimed is None:
        raise PreconditionError(f"{ctx.f.name} has no claimed discontinuity set")
    if claimed.traces is not None:
        return claimed.traces, mode
    anchor_id = ctx.f.anchor_id or ctx.scene.space.anchor_ids[0]
    return trace_of_predicate(space, anchor_id, claimed, name=claimed.describe()), TraceMode.GRID


@handler(TaskKind.NEARLY_OPEN)
def _nearly_open(ctx: TaskContext) -> Outcome:
    traces, mode = _named_traces(ctx)
    report = nearly_open_trace_check(traces, int(ctx.param("horizon", 4)), mode, seed=ctx.seed)
    failure = report.first_failure
    detail = f"{mode.value}: " + (failure.detail if failure else f"open through n={len(report.verdicts)}")
    return report.status, None, detail


@handler(TaskKind.SYMMETRIC)
def _symmetric(ctx: TaskContext) -> Outcome:
    space = ctx.scene.space
    net = ctx.net()
    box = BoxNeighborhood.around(ctx.u, float(ctx.param("radius", 1.0)), int(ctx.param("horizon", 3)))
    rng = np.random.default_rng(ctx.seed)
    sample = [ctx.u] + sample_box(space, ctx.f, ctx.u, box, rng, net.samples, net.probe_magnitudes,
                                  net.unconstrained_spread)
    verdict = projective_symmetry_check(space, box_predicate(space, box), ctx.u, sample)
    return verdict.status, float(verdict.checked), verdict.detail


@handler(TaskKind.WITNESS)
def _witness(ctx: TaskContext) -> Outcome:
    f, u = ctx.f, ctx.u
    slack = default("tolerances.witness_slack", 1e-9)
    if isinstance(f, Thm52Function):
        rho, _ = f.escape_rho(u)
        x = claim3_witness(f, u, int(ctx.param("m", 1)))
        value = f.evaluate(x)
        status = Status.PASS if abs(value - rho) <= slack else Status.FAIL
        return status, value, f"rho={rho!r}, witness {_fmt_point(x)}"
    fu = f.evaluate(u)
    witnesses = f.witnesses(u, ctx.net().box(u, 0))
    if not witnesses:
        return Status.FAIL, None, "no discontinuity witness at this point"
    gap, x = max(((abs(f.evaluate(w) - fu), w) for w in witnesses), key=lambda p: p[0])
    return Status.PASS, gap, f"witness {_fmt_point(x)}"


@handler(TaskKind.OSCILLATION)
def _oscillation(ctx: TaskContext) -> Outcome:
    estimate = oscillation_estimate(ctx.f, ctx.u, ctx.net(), ctx.tol)
    return estimate.verdict, estimate.certified_lower, f"sampled upper {estimate.sampled_upper[-1]:.6g}"


@handler(TaskKind.LSC)
def _lsc(ctx: TaskContext) -> Outcome:
    report = lower_semicontinuity_check(ctx.f, ctx.u, ctx.net())
    return report.status, report.metric, report.detail


@handler(TaskKind.CLAIM4)
def _claim4(ctx: TaskContext) -> Outcome:
    if not isinstance(ctx.f, Thm52Function):
        raise PreconditionError("Continuity boxes are built for single ball-product functions")
    report = claim4_check(ctx.f, ctx.u, float(ctx.param("eps", ctx.tol)), int(ctx.param("samples", 200)),
                          ctx.seed, ctx.net())
    return report.status, report.metric, report.detail


@handler(TaskKind.BUILD)
def _build(ctx: TaskContext) -> Outcome:
    f = ctx.f
    horizon = ctx.param("extend_radii")
    if horizon is None:
        return Status.PASS, None, json.dumps(f.describe(), sort_keys=True)
    claimed = f.claimed_discontinuities()
    if claimed is None or claimed.traces is None:
        raise PreconditionError(f"{f.name} has no analytic claimed set to extend radii in")
    try:
        radii = radii_extension(claimed.traces, ctx.u, int(horizon))
    except NotNearlyOpenError as e:
        return Status.NOT_OPEN, None, f"stage {e.stage}: {e}"
    bp = ball_product_from_radii(ctx.scene.space, ctx.u, radii)
    return Status.PASS, radii[-1], json.dumps(bp.to_dict(), sort_keys=True)


@handler(TaskKind.SLICE)
def _slice(ctx: TaskContext) -> Outcome:
    frame = emit_slice(ctx.f, ctx.u, tuple(ctx.param("coords", (1, 2))), tuple(ctx.param("grid", (-2.0, 2.0, 41))),
                       int(ctx.param("component", 0)))
    out = ctx.param("out")
    if out:
        write_csv(frame, out)
    return Status.PASS, float(len(frame)), f"{len(frame)} rows" + (f" written to {out}" if out else "")


@handler(TaskKind.VERIFY)
def _verify(ctx: TaskContext) -> Outcome:
    reports = run_verification_suite(ctx.seed)
    worst = max(reports, key=lambda r: severity(r.status))
    status = worst.status if severity(worst.status) else Status.PASS
    failed = sum(1 for r in reports if severity(r.status))
    return status, float(failed), ";".join(f"{r.check}={r.status.value}" for r in reports)


# Slices

def emit_slice(f: ConstructedFunction, base: SparsePoint, coords: Sequence[int],
               grid: Sequence[float], component: int = 0) -> pd.DataFrame:
    """
    f over a square grid in two coordinates, every other coordinate taken
    from `base`. grid is (lo, hi, steps); entry `component` of each chosen
    coordinate vector is varied. Rows are i, j, c1, c2, value.
    """
    c1, c2 = (int(c) for c in coords)
    if c1 == c2:
        raise PreconditionError("A slice needs two distinct coordinates")
    lo, hi, steps = float(grid[0]), float(grid[1]), int(grid[2])
    if steps < 1 or not hi >= lo:
        raise PreconditionError(f"Invalid slice grid {list(grid)}")
    space = f.space
    values = np.linspace(lo, hi, steps)
    v1 = np.array(space.coordinate(base, c1))
    v2 = np.array(space.coordinate(base, c2))
    rows = []
    for i, a in enumerate(values):
        for j, b in enumerate(values):
            v1[component], v2[component] = a, b
            x = space.with_coordinate(space.with_coordinate(base, c1, v1), c2, v2)
            rows.append((i, j, float(a), float(b), f.evaluate(x)))
    return pd.DataFrame(rows, columns=SLICE_COLUMNS)


# Runner

def _run_one(scene: Scene, index: int, default_seed: int, tol: float) -> TaskRecord:
    task = scene.tasks[index]
    seed = task.seed if task.seed is not None else default_seed
    try:
        # Each task gets its own space so anchors registered on the fly do not leak between tasks.
        local = build_scene(scene.document)
        ctx = TaskContext(local, task, seed, float(task.params.get("tol", tol)))
        status, metric, detail = TASK_HANDLERS[task.kind](ctx)
    except (SigmaError, ValueError, KeyError, TypeError) as e:
        logger.error(f"Task {index} ({task.label}) failed: {e}")
        return TaskRecord(index, task.label, task.kind.value, Status.ERROR, None, f"{type(e).__name__}: {e}")
    logger.info(f"Task {index} ({task.label}): {status.value}")
    return TaskRecord(index, task.label, task.kind.value, status,
                      None if metric is None else float(metric), detail)


def run_tasks(scene: Scene, seed: Optional[int] = None, tol: Optional[float] = None,
              workers: Optional[int] = None) -> ReportBundle:
    """
    Execute the scene's tasks; records come back in task order whatever the
    completion order. Task errors become ERROR records and never stop the run.
    """
    settings = get_settings()
    default_seed = scene.document.seed if seed is None else seed
    tol = settings.DEFAULT_TOL if tol is None else tol
    workers = workers or settings.WORKERS
    indices = range(len(scene.tasks))
    if workers > 1 and len(scene.tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda i: _run_one(scene, i, default_seed, tol), indices))
    else:
        records = [_run_one(scene, i, default_seed, tol) for i in indices]
    bundle = ReportBundle(sorted(records, key=lambda r: r.index))
    logger.info(f"Ran {len(records)} tasks, exit code {bundle.exit_code}")
    return bundle
