"""Shipped demo scenarios: ten everyday tasks with step scripts, plus floor
fixtures (a walk path and object placements) so each scenario can be
contextualized and generated without any capture hardware.

The scripts double as the mock instruction client's answer table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Pose6DoF, TrajectorySample, ValidationError
from .session import Detection, Project, ScanLog, SnapshotEvent

AUTHOR_WALK_SPEED_MPS = 1.2

_IDENTITY_POSE = (0.0, 0.0, 0.0, 1.0)  # quaternion x, y, z, w


@dataclass(frozen=True)
class Scenario:
    name: str  # slug used by the CLI
    task: str
    steps: tuple[str, ...]
    # demo floor fixture
    path_xy: tuple[tuple[float, float], ...]
    objects: tuple[tuple[str, float, float], ...]  # (object_id, x_m, y_m)


SCENARIOS: tuple[Scenario, ...] = (
    Scenario(
        name="charging-a-phone",
        task="Charging a Phone",
        steps=(
            "Get the charger",
            "Insert the cable into the phone",
            "Plug the charger into an outlet",
        ),
        path_xy=((0.0, 0.0), (2.0, 0.0), (2.0, 2.5)),
        objects=(("charger", 1.5, 0.0), ("phone", 2.0, 0.8), ("outlet", 2.0, 2.5)),
    ),
    Scenario(
        name="turning-on-the-tv",
        task="Turning on the TV",
        steps=("Pick up the remote", "Point it at the TV", "Press the power button"),
        path_xy=((0.0, 0.0), (1.5, 0.5), (3.0, 0.5)),
        objects=(("remote", 1.0, 0.3), ("tv", 3.5, 0.5), ("power button", 3.4, 0.6)),
    ),
    Scenario(
        name="closing-a-window",
        task="Closing a Window",
        steps=("Approach the window", "Grasp the handle or sash", "Push to close"),
        path_xy=((0.0, 0.0), (3.0, 0.0)),
        objects=(("window", 3.0, 0.0), ("handle", 3.0, 0.2)),
    ),
    Scenario(
        name="starting-a-computer",
        task="Starting a Computer",
        steps=(
            "Sit in front of the computer",
            "Press the power button",
            "Wait for it to boot up",
        ),
        path_xy=((0.0, 0.0), (1.2, 0.8)),
        objects=(("computer", 1.4, 1.0), ("power button", 1.3, 1.0)),
    ),
    Scenario(
        name="exercising",
        task="Exercising",
        steps=("Crawl", "Run", "Band Push", "Crawl to Stand"),
        path_xy=((0.0, 0.0), (4.0, 0.0), (4.0, 3.0), (0.0, 3.0)),
        objects=(("band", 4.0, 3.0),),
    ),
    Scenario(
        name="reading-a-book",
        task="Reading a Book",
        steps=(
            "Walk to the bookshelf",
            "Choose a book",
            "Go to the living room",
            "Sit on the couch or chair",
        ),
        path_xy=((0.0, 0.0), (2.5, 0.0), (2.5, 4.0), (1.0, 4.5)),
        objects=(("bookshelf", 2.7, 0.0), ("book", 2.6, 0.1), ("couch", 1.0, 4.7)),
    ),
    Scenario(
        name="closing-a-window-2",
        task="Closing a Window (slide)",
        steps=("Approach the window", "Grasp the handle or sash", "Push or slide to close"),
        path_xy=((0.0, 0.0), (3.0, 0.0)),
        objects=(("window", 3.0, 0.0), ("handle", 3.0, 0.2)),
    ),
    Scenario(
        name="eating-an-apple",
        task="Eating an apple",
        steps=(
            "Approach to the table",
            "Pick up the remote",
            "Eat the apple",
            "Move back",
            "Turn around",
            "Leave the kitchen",
        ),
        path_xy=((0.0, 0.0), (2.0, 0.0), (2.0, 1.5), (0.0, 1.5), (0.0, 3.5)),
        objects=(("table", 2.0, 0.3), ("remote", 2.1, 0.5), ("apple", 2.0, 0.9)),
    ),
    Scenario(
        name="use-a-3d-printer",
        task="Use a 3D printer",
        steps=("Pick up PVA", "Go to printer", "Attach Filament to printer", "Start printer"),
        path_xy=((0.0, 0.0), (1.5, 0.0), (4.5, 0.0), (6.0, 0.0)),
        objects=(("pva", 1.5, 0.0), ("printer", 6.0, 0.0)),
    ),
    Scenario(
        name="making-tea",
        task="Making Tea",
        steps=(
            "Boil the water",
            "Place a cup on the table",
            "Pick the pot",
            "Pour boiling water into the cup",
        ),
        path_xy=((0.0, 0.0), (1.8, 0.0), (1.8, 1.8)),
        objects=(("cup", 1.8, 1.0), ("pot", 1.0, 0.0), ("table", 1.8, 1.8)),
    ),
)


def scenario_names() -> list[str]:
    return [s.name for s in SCENARIOS]


def get_scenario(name: str) -> Scenario:
    for scenario in SCENARIOS:
        if scenario.name == name:
            return scenario
    raise ValidationError(
        f"unknown scenario {name!r}; available: {', '.join(scenario_names())}"
    )


def instruction_table() -> dict[str, list[str]]:
    """task text -> step list, for the mock instruction client."""
    table: dict[str, list[str]] = {}
    for scenario in SCENARIOS:
        table.setdefault(scenario.task.lower(), list(scenario.steps))
    return table


def synthesize_scan_log(
    path_xy, objects, speed_mps: float = AUTHOR_WALK_SPEED_MPS
) -> ScanLog:
    """Walk the polyline at constant speed, snapshotting all objects at the end."""
    pts = np.asarray(path_xy, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        raise ValidationError("path needs at least two 2-D waypoints")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    times = arc / speed_mps
    samples: list[TrajectorySample] = []
    last_t = None
    for t, (x, y) in zip(times, pts):
        if last_t is not None and t <= last_t:
            continue  # duplicated waypoint stalls the clock; drop it
        samples.append(TrajectorySample(float(t), float(x), float(y)))
        last_t = t
    detections = tuple(
        Detection(
            object_id=name,
            pose_6dof=Pose6DoF((float(x), float(y), 0.0), _IDENTITY_POSE),
            confidence=0.9,
        )
        for name, x, y in objects
    )
    snapshot = SnapshotEvent(t_s=float(times[-1]), detections=detections)
    return ScanLog(trajectory_samples=tuple(samples), snapshot_events=(snapshot,))


def build_demo_project(name: str, project_id: str = "demo") -> Project:
    """A ready-to-compile project for the named scenario: script, one group
    covering every step, and a synthesized scan."""
    from .session import MockInstructionClient

    scenario = get_scenario(name)
    project = Project(project_id=project_id)
    client = MockInstructionClient({scenario.task.lower(): list(scenario.steps)})
    project.set_task(scenario.task, client)
    group = project.create_group([s.id for s in project.steps])
    log = synthesize_scan_log(scenario.path_xy, scenario.objects)
    project.ingest_scan(group.id, log)
    return project
