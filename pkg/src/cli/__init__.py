"""
Scene files, task runner, CSV output and the command line.
"""
from src.cli.runner import ReportBundle, TaskRecord, emit_slice, run_tasks, write_csv
from src.cli.scene import Scene, SceneError, SceneErrorCode, TaskKind, build_scene, emit_scene, parse_scene
from src.cli.verify import SuiteSizes, run_verification_suite

__all__ = [
    "ReportBundle",
    "TaskRecord",
    "emit_slice",
    "run_tasks",
    "write_csv",
    "Scene",
    "SceneError",
    "SceneErrorCode",
    "TaskKind",
    "build_scene",
    "emit_scene",
    "parse_scene",
    "SuiteSizes",
    "run_verification_suite",
]
