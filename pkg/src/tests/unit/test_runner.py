"""
Unit tests for the task runner, slices and CSV output.
"""
import io
import json

import pandas as pd
import pytest

from src.cli.runner import REPORT_COLUMNS, SLICE_COLUMNS, TASK_HANDLERS, emit_slice, run_tasks
from src.cli.scene import TaskKind, parse_scene
from src.sigma.errors import PreconditionError
from src.sigma.verdicts import Status


@pytest.fixture
def scene_with(golden_scene_text):
    """The golden scene with its task list replaced."""
    def build(tasks, **changes):
        data = json.loads(golden_scene_text)
        data["tasks"] = tasks
        data.update(changes)
        return parse_scene(json.dumps(data))
    return build


def _csv(bundle) -> str:
    buffer = io.StringIO()
    bundle.to_csv(buffer)
    return buffer.getvalue()


@pytest.mark.unit
class TestRunTasks:
    """Records, statuses and exit codes."""

    def test_every_kind_has_a_handler(self):
        """The registry covers the task kinds."""
        assert set(TASK_HANDLERS) == set(TaskKind)

    def test_eval(self, scene_with):
        """f vanishes on W and equals the escape distance outside."""
        bundle = run_tasks(scene_with([
            {"kind": "eval", "function": "f", "point": "inside"},
            {"kind": "eval", "function": "f", "point": "outside"},
            {"kind": "eval", "function": "shifted_norm", "point": "offset"},
        ]))
        metrics = [r.metric for r in bundle.records]
        assert metrics[0] == 0.0
        assert metrics[1] == pytest.approx(0.6)
        assert metrics[2] == pytest.approx(3.0)
        assert bundle.exit_code == 0

    def test_empty_tasks(self, scene_with):
        """No tasks, no records, exit 0."""
        bundle = run_tasks(scene_with([]))
        assert bundle.records == []
        assert bundle.exit_code == 0
        assert _csv(bundle) == ",".join(REPORT_COLUMNS) + "\n"

    def test_error_record(self, scene_with):
        """Task errors become ERROR records and the run continues."""
        bundle = run_tasks(scene_with([
            {"kind": "claim4", "function": "ind", "point": "origin"},
            {"kind": "eval", "function": "f", "point": "origin"},
        ]))
        first, second = bundle.records
        assert first.status == Status.ERROR
        assert first.detail.startswith("PreconditionError")
        assert second.status == Status.PASS
        assert bundle.exit_code == 1

    def test_failing_status_sets_exit_code(self, scene_with):
        """NOT_OPEN counts as a failure."""
        bundle = run_tasks(scene_with([
            {"kind": "nearly-open", "function": "f", "point": "inside", "params": {"set": "singleton"}},
        ]))
        assert bundle.records[0].status == Status.NOT_OPEN
        assert bundle.exit_code == 1

    def test_black_box_claimed_set_not_open(self, scene_with):
        """The claimed set {|x_1| = 1} of a sphere step is rejected on the grid."""
        bundle = run_tasks(scene_with(
            [{"kind": "nearly-open", "function": "step", "params": {"mode": "GRID"}}],
            constructions={"step": {"kind": "COORDINATE", "profile": "sphere_step", "indices": [1]}},
        ))
        record = bundle.records[0]
        assert record.status == Status.NOT_OPEN
        assert record.detail.startswith("GRID: no ball")
        assert bundle.exit_code == 1

    def test_informational_statuses(self, scene_with):
        """DISCONTINUOUS and NOT_FOUND do not fail a run."""
        bundle = run_tasks(scene_with([
            {"kind": "oscillation", "function": "f", "point": "origin"},
            {"kind": "criterion", "function": "ind", "point": "origin", "params": {"horizon": 3}},
        ]))
        assert [r.status for r in bundle.records] == [Status.DISCONTINUOUS, Status.NOT_FOUND]
        assert bundle.exit_code == 0

    def test_witness_and_build(self, scene_with):
        """Escape witnesses are certified; radii extension returns a ball product."""
        bundle = run_tasks(scene_with([
            {"kind": "witness", "function": "f", "point": "inside", "params": {"m": 3}},
            {"kind": "build", "function": "f", "point": "inside", "params": {"extend_radii": 4}},
            {"kind": "build", "function": "g"},
        ]))
        witness, extended, described = bundle.records
        assert witness.status == Status.PASS
        assert witness.metric == pytest.approx(0.6)
        assert extended.status == Status.PASS
        assert extended.metric > 0.0
        assert json.loads(described.detail)["kind"] == "THM53_UNION"

    def test_csv_is_deterministic(self, scene_with):
        """Two runs of the same scene give byte-identical CSV."""
        tasks = [
            {"kind": "ssc", "function": "f", "point": "inside", "params": {"t": 1, "levels": 3, "samples": 16}},
            {"kind": "oscillation", "function": "g", "point": "outside", "params": {"levels": 3, "samples": 16}},
            {"kind": "eval", "function": "f", "point": "outside"},
        ]
        first = _csv(run_tasks(scene_with(tasks)))
        second = _csv(run_tasks(scene_with(tasks)))
        assert first == second
        assert "\r" not in first
        assert first.splitlines()[0] == ",".join(REPORT_COLUMNS)

    def test_workers_keep_order(self, scene_with):
        """Parallel runs give the records of a sequential run, in task order."""
        tasks = [{"kind": "eval", "function": name, "point": point}
                 for name in ("f", "g", "norm1") for point in ("origin", "inside", "outside")]
        scene = scene_with(tasks)
        sequential = run_tasks(scene, workers=1)
        parallel = run_tasks(scene, workers=4)
        assert [r.index for r in parallel.records] == list(range(len(tasks)))
        assert _csv(parallel) == _csv(sequential)

    def test_task_seed_wins(self, scene_with):
        """A task seed is used whatever seed the run gets."""
        task = {"kind": "ssc", "function": "f", "point": "inside", "seed": 3,
                "params": {"t": 2, "levels": 2, "samples": 8}}
        scene = scene_with([task])
        assert _csv(run_tasks(scene, seed=1)) == _csv(run_tasks(scene, seed=2))


@pytest.mark.unit
class TestSlice:
    """Two-coordinate slices."""

    def test_unit_square(self, golden_scene):
        """f is zero strictly inside the open square and positive away from its spheres."""
        frame = emit_slice(golden_scene.function("f"), golden_scene.point("origin"), (1, 2), (-2.0, 2.0, 9))
        assert list(frame.columns) == SLICE_COLUMNS
        assert len(frame) == 81
        for row in frame.itertuples():
            a, b = abs(row.c1), abs(row.c2)
            if a < 1 and b < 1:
                assert row.value == 0.0
            elif max(a, b) > 1 and 1.0 not in (a, b):
                assert row.value > 0.0

    def test_row_order(self, golden_scene):
        """Rows run over j inside i."""
        frame = emit_slice(golden_scene.function("norm1"), golden_scene.point("origin"), (1, 2), (0.0, 1.0, 2))
        assert frame[["i", "j"]].values.tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
        assert frame["value"].tolist() == [0.0, 0.0, 1.0, 1.0]

    def test_slice_task_writes_csv(self, scene_with, temp_dir):
        """The slice task can write its rows to a file."""
        out = temp_dir / "slice.csv"
        bundle = run_tasks(scene_with([{"kind": "slice", "function": "f", "point": "origin",
                                        "params": {"coords": [1, 2], "grid": [-1.5, 1.5, 4], "out": str(out)}}]))
        assert bundle.records[0].metric == 16.0
        assert len(pd.read_csv(out)) == 16

    @pytest.mark.parametrize("coords,grid", [((1, 1), (0.0, 1.0, 3)), ((1, 2), (1.0, 0.0, 3)), ((1, 2), (0.0, 1.0, 0))])
    def test_invalid(self, golden_scene, coords, grid):
        """Repeated coordinates and empty grids are rejected."""
        with pytest.raises(PreconditionError):
            emit_slice(golden_scene.function("f"), golden_scene.point("origin"), coords, grid)
