"""
Command-line front end.

    python -m src.cli.main --scene config/golden_scene.json run
    python -m src.cli.main --scene s.json eval --function f --point u
    python -m src.cli.main --scene s.json check ssc --function f --point u --param t=2
    python -m src.cli.main --scene s.json slice --function f --point u --param coords=[1,2]
    python -m src.cli.main verify --seed 7
    python -m src.cli.main verify --full

Exit codes: 0 when every record passes, 1 when any record fails, 2 for
usage or scene errors.
"""
import argparse
import json
import sys
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from src.cli.runner import REPORT_COLUMNS, ReportBundle, emit_slice, run_tasks, write_csv
from src.cli.scene import (
    Scene,
    SceneError,
    TaskKind,
    TaskModel,
    build_scene,
    emit_scene,
    parse_document,
    parse_scene,
)
from src.cli.verify import SuiteSizes, run_verification_suite
from src.sigma.errors import SigmaError
from src.sigma.verdicts import severity
from src.utils.config import get_settings
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CHECKS = {
    "ssc": TaskKind.SSC,
    "sep": TaskKind.SEP,
    "criterion": TaskKind.CRITERION,
    "scont": TaskKind.SCONT,
    "nearly-open": TaskKind.NEARLY_OPEN,
    "symmetric": TaskKind.SYMMETRIC,
    "lsc": TaskKind.LSC,
    "claim4": TaskKind.CLAIM4,
}


def _param(text: str):
    """key=value with a JSON value, falling back to the raw string."""
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog=settings.APP_NAME, description="Strongly separately continuous functions "
                                                                        "on sigma-products: build, evaluate, verify.")
    parser.add_argument("--version", action="version", version=f"{settings.APP_NAME} {settings.APP_VERSION}")
    parser.add_argument("--scene", help="scene JSON file")
    parser.add_argument("--seed", type=int, help="seed for tasks without their own")
    parser.add_argument("--out", help="output CSV path (default: stdout)")
    parser.add_argument("--tol", type=float, help="continuity tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    def target(p: argparse.ArgumentParser, point: bool = True) -> None:
        p.add_argument("--function", required=True)
        if point:
            p.add_argument("--point", required=True)
        p.add_argument("--param", action="append", type=_param, default=[], metavar="KEY=VALUE")

    target(sub.add_parser("eval", help="evaluate a function at a point"))
    check = sub.add_parser("check", help="run one continuity or topology check")
    check.add_argument("check", choices=sorted(CHECKS))
    check.add_argument("--function", required=True)
    check.add_argument("--point")
    check.add_argument("--param", action="append", type=_param, default=[], metavar="KEY=VALUE")
    target(sub.add_parser("witness", help="discontinuity witness at a point"))
    target(sub.add_parser("oscillation", help="oscillation estimate at a point"))
    build = sub.add_parser("build", help="describe constructions (optionally extend radii at --point)")
    build.add_argument("--function")
    build.add_argument("--point")
    build.add_argument("--param", action="append", type=_param, default=[], metavar="KEY=VALUE")
    build.add_argument("--emit-scene", action="store_true", help="print the canonical scene JSON instead")
    target(sub.add_parser("slice", help="2-D slice of a function as CSV rows i,j,c1,c2,value"))
    verify = sub.add_parser("verify", help="run the verification suite")
    verify.add_argument("--only", action="append", help="restrict to named checks")
    verify.add_argument("--full", action="store_true", help="run at the full case counts (slow)")
    sub.add_parser("run", help="run every task of the scene")
    return parser


def _load_scene(path: Optional[str]) -> Scene:
    if not path:
        raise SceneError("SCHEMA_VIOLATION", "", "this command needs --scene")
    with open(path, "r", encoding="utf-8") as f:
        return parse_scene(f.read())


def _with_tasks(scene: Scene, tasks: List[TaskModel]) -> Scene:
    """The scene with its task list replaced; references are validated again."""
    data = scene.document.dict()
    data["tasks"] = [t.dict() for t in tasks]
    return build_scene(parse_document(data))


def _single_tasks(args: argparse.Namespace, scene: Scene) -> List[TaskModel]:
    params: Dict[str, Any] = dict(args.param)
    point = getattr(args, "point", None)
    if args.command == "check":
        kind = CHECKS[args.check]
    elif args.command == "build":
        names = [args.function] if args.function else list(scene.document.constructions)
        return [TaskModel(kind=TaskKind.BUILD, function=n, point=point, params=params) for n in names]
    else:
        kind = TaskKind(args.command)
    return [TaskModel(kind=kind, function=args.function, point=point, params=params)]


def _emit(frame: pd.DataFrame, out: Optional[str]) -> None:
    write_csv(frame, out or sys.stdout)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    seed = args.seed
    try:
        if args.command == "verify":
            sizes = SuiteSizes.acceptance() if args.full else None
            reports = run_verification_suite(seed if seed is not None else settings.DEFAULT_SEED, sizes=sizes,
                                             only=args.only)
            frame = pd.DataFrame([{"index": i, "task": r.check, "kind": "verify", "status": r.status.value,
                                   "severity": severity(r.status), "metric": r.metric, "detail": r.detail}
                                  for i, r in enumerate(reports)],
                                 columns=REPORT_COLUMNS)
            _emit(frame, args.out)
            return EXIT_FAIL if any(severity(r.status) for r in reports) else EXIT_OK

        scene = _load_scene(args.scene)
        if args.command == "build" and args.emit_scene:
            text = emit_scene(scene)
            if args.out:
                with open(args.out, "w", encoding="utf-8", newline="\n") as f:
                    f.write(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        if args.command == "slice":
            params = dict(args.param)
            frame = emit_slice(scene.function(args.function), scene.point(args.point),
                               params.get("coords", (1, 2)), params.get("grid", (-2.0, 2.0, 41)),
                               int(params.get("component", 0)))
            _emit(frame, args.out)
            return EXIT_OK
        if args.command != "run":
            scene = _with_tasks(scene, _single_tasks(args, scene))
        bundle: ReportBundle = run_tasks(scene, seed=seed, tol=args.tol)
        bundle.to_csv(args.out or sys.stdout)
        return EXIT_FAIL if bundle.exit_code else EXIT_OK
    except SceneError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except (SigmaError, KeyError, ValueError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
