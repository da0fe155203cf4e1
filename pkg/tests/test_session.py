import numpy as np
import pytest

from motionloom.core import Pose6DoF, Trajectory, ValidationError
from motionloom.scenarios import (
    build_demo_project,
    get_scenario,
    scenario_names,
    synthesize_scan_log,
)
from motionloom.session import (
    Detection,
    GenerationPlan,
    MockInstructionClient,
    Project,
    RenderScale,
    ScanLog,
    SnapshotEvent,
    StepStatus,
    UncontextualizedError,
    UnknownIdError,
    match_keypoint,
    parse_instruction_lines,
    refine_instructions,
    slice_trajectory,
)

IDENTITY = (0.0, 0.0, 0.0, 1.0)


def det(object_id, x, y, conf=0.9):
    return Detection(object_id=object_id, pose_6dof=Pose6DoF((x, y, 0.0), IDENTITY), confidence=conf)


def walk_log(*pts, snapshots=()):
    samples = tuple((float(i), float(x), float(y)) for i, (x, y) in enumerate(pts))
    return ScanLog(trajectory_samples=samples, snapshot_events=tuple(snapshots))


def contextualized_project(n_steps=3, objects=("printer",)):
    project = Project()
    for i in range(n_steps):
        project.insert_step(f"Do thing {i} with the printer")
    group = project.create_group([s.id for s in project.steps])
    snapshot = SnapshotEvent(t_s=3.0, detections=tuple(det(o, 3.0, 0.0) for o in objects))
    project.ingest_scan(group.id, walk_log((0, 0), (1, 0), (2, 0), (3, 0), snapshots=[snapshot]))
    return project


# -- refinement ---------------------------------------------------------------

def test_mock_printer_script():
    client = MockInstructionClient()
    steps = refine_instructions("Use a 3D printer", client)
    assert steps == ["Pick up PVA", "Go to printer", "Attach Filament to printer", "Start printer"]


def test_mock_deterministic_and_total():
    client = MockInstructionClient()
    a = client.refine("polish the telescope mirror")
    b = client.refine("polish the telescope mirror")
    assert a == b
    assert len(a) == 3


def test_empty_task_rejected():
    client = MockInstructionClient()
    with pytest.raises(ValidationError):
        refine_instructions("   ", client)


def test_parse_instruction_lines():
    text = "1. Pick up PVA\n2) Go to printer\nStep 3: Attach Filament to printer\n- Start printer\n"
    assert parse_instruction_lines(text) == [
        "Pick up PVA",
        "Go to printer",
        "Attach Filament to printer",
        "Start printer",
    ]


# -- script editing ------------------------------------------------------------

def test_set_task_builds_steps():
    project = Project()
    steps = project.set_task("Use a 3D printer", MockInstructionClient())
    assert [s.text for s in steps] == [
        "Pick up PVA",
        "Go to printer",
        "Attach Filament to printer",
        "Start printer",
    ]
    assert all(s.status is StepStatus.DRAFT for s in steps)


def test_delete_then_reinsert_same_text_new_id():
    project = Project()
    s1 = project.insert_step("Warm up the oven")
    project.delete_step(s1.id)
    s2 = project.insert_step("Warm up the oven")
    assert s2.text == s1.text
    assert s2.id != s1.id


def test_edit_contextualized_step_reverts_to_draft():
    project = contextualized_project()
    sid = project.steps[0].id
    assert project.steps[0].status is StepStatus.CONTEXTUALIZED
    project.edit_step(sid, text="Do something else entirely")
    assert project.steps[0].status is StepStatus.DRAFT
    # scale-only edits keep the context
    project.edit_step(project.steps[1].id, scale=RenderScale.HANDS_ONLY)
    assert project.steps[1].status is StepStatus.CONTEXTUALIZED


def test_insert_preserves_relative_order():
    project = Project()
    for text in ("a", "b", "c"):
        project.insert_step(text)
    before = [s.text for s in project.steps]
    project.insert_step("x", index=1)
    after = [s.text for s in project.steps]
    assert after == ["a", "x", "b", "c"]
    assert [t for t in after if t != "x"] == before


def test_delete_inside_group_detaches_with_notice():
    project = contextualized_project(n_steps=3)
    group = project.groups[0]
    sid = group.step_ids[1]
    notices = project.delete_step(sid)
    assert any("detached" in n for n in notices)
    assert sid not in group.step_ids


def test_unknown_ids_raise():
    project = Project()
    with pytest.raises(UnknownIdError):
        project.edit_step("nope", text="x")
    with pytest.raises(UnknownIdError):
        project.delete_step("nope")
    with pytest.raises(UnknownIdError):
        project.group("nope")


# -- groups / scans ---------------------------------------------------------------

def test_group_requires_ungrouped_existing_steps():
    project = Project()
    a = project.insert_step("a")
    b = project.insert_step("b")
    project.create_group([a.id])
    with pytest.raises(ValidationError):
        project.create_group([a.id, b.id])
    with pytest.raises(UnknownIdError):
        project.create_group(["ghost"])
    with pytest.raises(ValidationError):
        project.create_group([])


def test_ingest_keeps_only_last_snapshot():
    project = Project()
    s = project.insert_step("grab the mug")
    group = project.create_group([s.id])
    early = SnapshotEvent(t_s=1.0, detections=(det("kettle", 0.5, 0.0),))
    late = SnapshotEvent(t_s=2.0, detections=(det("mug", 2.0, 0.0),))
    project.ingest_scan(group.id, walk_log((0, 0), (1, 0), (2, 0), snapshots=[early, late]))
    assert [kp.object_id for kp in group.snapshot] == ["mug"]
    assert project.steps[0].status is StepStatus.CONTEXTUALIZED


def test_ingest_without_snapshot_warns_trajectory_only():
    project = Project()
    s = project.insert_step("walk the hallway")
    group = project.create_group([s.id])
    warnings = project.ingest_scan(group.id, walk_log((0, 0), (1, 0)))
    assert warnings and "snapshot" in warnings[0]
    assert group.snapshot == []
    assert group.trajectory is not None


def test_ingest_requires_trajectory():
    project = Project()
    s = project.insert_step("x")
    group = project.create_group([s.id])
    snap = SnapshotEvent(t_s=0.0, detections=(det("mug", 0, 0),))
    log = ScanLog(trajectory_samples=(), snapshot_events=(snap,))
    with pytest.raises(ValidationError):
        project.ingest_scan(group.id, log)


def test_scan_log_decreasing_timestamps_rejected():
    with pytest.raises(ValidationError):
        ScanLog(trajectory_samples=((1.0, 0, 0), (0.5, 1, 1)), snapshot_events=())


def test_scan_log_confidence_range():
    with pytest.raises(ValidationError):
        det("mug", 0, 0, conf=1.5)


def test_scan_log_jsonl_roundtrip():
    log = walk_log((0, 0), (1, 0), snapshots=[SnapshotEvent(1.0, (det("mug", 1, 0),))])
    text = log.to_jsonl()
    parsed = ScanLog.from_jsonl(text)
    assert parsed == log
    assert text.splitlines()[0] == '{"type": "header", "version": 1}'


# -- plan compilation ----------------------------------------------------------------

def test_compile_three_steps_frame_ranges():
    project = contextualized_project(n_steps=3)
    plan = project.compile_plan()
    assert [s.frame_range for s in plan.steps] == [(0, 90), (90, 180), (180, 270)]
    assert plan.total_frames == 270
    assert plan.boundaries == (90, 180)


def test_compile_requires_contextualization():
    project = Project()
    project.insert_step("a")
    project.insert_step("b")
    with pytest.raises(UncontextualizedError) as err:
        project.compile_plan()
    assert set(err.value.step_ids) == {s.id for s in project.steps}


def test_keypoint_substring_match():
    project = Project()
    s1 = project.insert_step("Pick up the apple")
    s2 = project.insert_step("Walk away")
    group = project.create_group([s1.id, s2.id])
    snap = SnapshotEvent(2.0, (det("apple", 1.0, 0.5),))
    project.ingest_scan(group.id, walk_log((0, 0), (1, 0), (2, 0), snapshots=[snap]))
    plan = project.compile_plan()
    assert plan.steps[0].target is not None
    assert plan.steps[0].target.object_id == "apple"
    assert plan.steps[1].target is None


def test_match_is_case_insensitive():
    from motionloom.core import Keypoint

    kps = [Keypoint(0, 0, "PVA")]
    assert match_keypoint("pick up pva now", kps) is not None
    assert match_keypoint("unrelated", kps) is None


def test_trajectory_slices_partition_arc_length():
    project = Project()
    ids = [project.insert_step(f"leg {i}").id for i in range(2)]
    group = project.create_group(ids)
    # 10 m straight walk
    project.ingest_scan(group.id, walk_log((0, 0), (5, 0), (10, 0)))
    plan = project.compile_plan()
    lengths = [s.trajectory.arc_length() for s in plan.steps]
    assert lengths == pytest.approx([5.0, 5.0])
    assert plan.steps[0].trajectory.samples[-1].x_m == pytest.approx(5.0)
    assert plan.steps[1].trajectory.samples[0].x_m == pytest.approx(5.0)


def test_slice_trajectory_keeps_interior_waypoints():
    t = Trajectory(samples=((0.0, 0, 0), (1.0, 1, 0), (2.0, 1, 1)))
    first = slice_trajectory(t, 0, 2)
    assert first.samples[-1].x_m == pytest.approx(1.0)
    second = slice_trajectory(t, 1, 2)
    assert second.samples[0].x_m == pytest.approx(1.0)
    assert second.samples[-1].y_m == pytest.approx(1.0)


def test_plan_frame_partition_property():
    project = contextualized_project(n_steps=4)
    plan = project.compile_plan(frames_per_step=50)
    covered = []
    for step in plan.steps:
        covered.extend(range(*step.frame_range))
    assert covered == list(range(plan.total_frames))


def test_plan_caps():
    project = contextualized_project(n_steps=3)
    with pytest.raises(ValidationError):
        project.compile_plan(frames_per_step=400)  # 1200 > 1024 hard cap
    plan = project.compile_plan(frames_per_step=90)  # 270 > 196 soft cap
    assert plan.warnings and "196" in plan.warnings[0]


def test_plan_file_roundtrip(tmp_path):
    project = contextualized_project(n_steps=2)
    plan = project.compile_plan()
    path = tmp_path / "plan.json"
    plan.save(path)
    loaded = GenerationPlan.load(path)
    assert loaded == plan


def test_compile_is_pure():
    project = contextualized_project(n_steps=3)
    assert project.compile_plan() == project.compile_plan()


# -- project round-trip across mutations ------------------------------------------------

def test_project_roundtrip_after_every_mutation():
    project = Project()
    checkpoints = []

    def snap():
        checkpoints.append(project.dumps())
        assert Project.loads(project.dumps()).to_dict() == project.to_dict()

    project.set_task("Use a 3D printer", MockInstructionClient())
    snap()
    project.insert_step("Inspect the nozzle", index=1)
    snap()
    project.edit_step(project.steps[0].id, scale=RenderScale.HANDS_ONLY)
    snap()
    project.delete_step(project.steps[-1].id)
    snap()
    group = project.create_group([s.id for s in project.steps[:2]])
    snap()
    snapshot = SnapshotEvent(2.0, (det("pva", 1.5, 0.0),))
    project.ingest_scan(group.id, walk_log((0, 0), (1, 0), (2, 0), snapshots=[snapshot]))
    snap()
    assert len(set(checkpoints)) == len(checkpoints)  # every mutation changed state


def test_random_mutation_walk_roundtrips():
    rng = np.random.default_rng(12)
    project = Project()
    project.set_task("Making Tea", MockInstructionClient())
    for _ in range(60):
        op = rng.integers(0, 4)
        if op == 0:
            project.insert_step(f"extra {rng.integers(1e6)}", index=int(rng.integers(0, len(project.steps) + 1)))
        elif op == 1 and project.steps:
            sid = project.steps[rng.integers(len(project.steps))].id
            project.edit_step(sid, text=f"edited {rng.integers(1e6)}")
        elif op == 2 and len(project.steps) > 1:
            sid = project.steps[rng.integers(len(project.steps))].id
            project.delete_step(sid)
        else:
            free = [s.id for s in project.steps if project.group_of(s.id) is None]
            if free:
                size = int(rng.integers(1, min(3, len(free)) + 1))
                project.create_group(list(rng.choice(free, size=size, replace=False)))
        restored = Project.loads(project.dumps())
        assert restored.to_dict() == project.to_dict()


# -- demo scenarios ---------------------------------------------------------------------

def test_scenario_catalog():
    names = scenario_names()
    assert "use-a-3d-printer" in names
    assert "eating-an-apple" in names
    assert len(names) == 10


def test_eating_an_apple_six_step_plan():
    project = build_demo_project("eating-an-apple")
    plan = project.compile_plan()
    assert len(plan.steps) == 6
    assert [s.text for s in plan.steps] == [
        "Approach to the table",
        "Pick up the remote",
        "Eat the apple",
        "Move back",
        "Turn around",
        "Leave the kitchen",
    ]


def test_synthesized_scan_walks_at_fixed_speed():
    scenario = get_scenario("use-a-3d-printer")
    log = synthesize_scan_log(scenario.path_xy, scenario.objects)
    # 6 m path at 1.2 m/s -> 5 s of timestamps
    assert log.trajectory_samples[-1].t_s == pytest.approx(5.0)
    assert log.snapshot_events[-1].detections  # objects present


def test_unknown_scenario():
    with pytest.raises(ValidationError):
        get_scenario("paint-the-fence")
