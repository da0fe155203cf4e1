"""Authoring data model: instruction scripts, context groups, scan ingestion,
and compilation into an executable generation plan.

A project is a script of instruction steps. The author groups steps that
happen at the same location, then contextualizes each group with a scan log
(a walked trajectory plus snapshot events carrying detected objects). Once
every step is contextualized the project compiles into a GenerationPlan:
per step a condition text, a frame range, a slice of the group's trajectory,
and optionally a matched target keypoint.
"""

from __future__ import annotations

import json
import os
import urllib.error
import urllib.request
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .core import (
    DEFAULT_FPS,
    Keypoint,
    MotionFormatError,
    Pose6DoF,
    Skeleton,
    Trajectory,
    TrajectorySample,
    ValidationError,
    canonical_dumps,
)
from .diffusion.embedding import QUALITY_FRAME_CAP

DEFAULT_FRAMES_PER_STEP = 90
# plans execute step by step, so they may run longer than a single jointly
# sampled sequence; the plan cap only guards runaway scripts
PLAN_HARD_FRAME_CAP = 1024


class StepStatus(str, Enum):
    DRAFT = "draft"
    CONTEXTUALIZED = "contextualized"


class RenderScale(str, Enum):
    FULL_BODY = "full_body"
    HANDS_ONLY = "hands_only"


class UncontextualizedError(ValidationError):
    """Raised when compilation needs steps that are still drafts."""

    def __init__(self, step_ids: Sequence[str]):
        self.step_ids = tuple(step_ids)
        super().__init__(f"steps not contextualized: {', '.join(self.step_ids)}")


class UnknownIdError(KeyError):
    """Referenced step/group/project id does not exist."""


@dataclass
class InstructionStep:
    id: str
    text: str
    status: StepStatus = StepStatus.DRAFT
    scale: RenderScale = RenderScale.FULL_BODY

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "status": self.status.value,
            "scale": self.scale.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InstructionStep":
        return cls(
            id=str(data["id"]),
            text=str(data["text"]),
            status=StepStatus(data.get("status", "draft")),
            scale=RenderScale(data.get("scale", "full_body")),
        )


@dataclass
class ContextGroup:
    id: str
    step_ids: list[str]
    trajectory: Trajectory | None = None
    snapshot: list[Keypoint] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "step_ids": list(self.step_ids),
            "trajectory": None if self.trajectory is None else self.trajectory.to_dict(),
            "snapshot": [kp.to_dict() for kp in self.snapshot],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ContextGroup":
        traj = data.get("trajectory")
        return cls(
            id=str(data["id"]),
            step_ids=[str(s) for s in data["step_ids"]],
            trajectory=None if traj is None else Trajectory.from_dict(traj),
            snapshot=[Keypoint.from_dict(kp) for kp in data.get("snapshot", [])],
        )


# ---------------------------------------------------------------------------
# Scan logs
# ---------------------------------------------------------------------------

SCAN_LOG_VERSION = 1


@dataclass(frozen=True)
class Detection:
    object_id: str
    pose_6dof: Pose6DoF
    confidence: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(f"confidence {self.confidence} outside [0, 1]")
        if not self.object_id:
            raise ValidationError("detection needs an object_id")


@dataclass(frozen=True)
class SnapshotEvent:
    t_s: float
    detections: tuple[Detection, ...]


@dataclass(frozen=True)
class ScanLog:
    """An author walk: trajectory samples interleaved with snapshot events."""

    trajectory_samples: tuple[TrajectorySample, ...]
    snapshot_events: tuple[SnapshotEvent, ...]

    def __post_init__(self) -> None:
        samples = tuple(TrajectorySample(*s) for s in self.trajectory_samples)
        events = tuple(self.snapshot_events)
        for stream, what in ((samples, "trajectory"), (events, "snapshot")):
            times = [r.t_s for r in stream]
            if any(b < a for a, b in zip(times, times[1:])):
                raise ValidationError(f"scan log {what} timestamps must be non-decreasing")
        object.__setattr__(self, "trajectory_samples", samples)
        object.__setattr__(self, "snapshot_events", events)

    def trajectory(self, frame_of_reference: str = "floor") -> Trajectory:
        """Strictly increasing trajectory built from the samples (dups dropped)."""
        kept: list[TrajectorySample] = []
        for s in self.trajectory_samples:
            if not kept or s.t_s > kept[-1].t_s:
                kept.append(s)
        if len(kept) < 2:
            raise ValidationError("scan log needs at least 2 trajectory samples")
        return Trajectory(samples=tuple(kept), frame_of_reference=frame_of_reference)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"type": "header", "version": SCAN_LOG_VERSION})]
        for s in self.trajectory_samples:
            lines.append(
                json.dumps({"type": "trajectory", "t_s": s.t_s, "x_m": s.x_m, "y_m": s.y_m})
            )
        for e in self.snapshot_events:
            lines.append(
                json.dumps(
                    {
                        "type": "snapshot",
                        "t_s": e.t_s,
                        "detections": [
                            {
                                "object_id": d.object_id,
                                "pose_6dof": {
                                    "position": list(d.pose_6dof.position),
                                    "quaternion": list(d.pose_6dof.quaternion),
                                },
                                "confidence": d.confidence,
                            }
                            for d in e.detections
                        ],
                    }
                )
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "ScanLog":
        samples: list[TrajectorySample] = []
        events: list[SnapshotEvent] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MotionFormatError(f"scan log line {lineno}: not JSON: {exc}") from exc
            kind = record.get("type")
            if kind == "header":
                version = record.get("version")
                if version != SCAN_LOG_VERSION:
                    raise MotionFormatError(
                        f"scan log version {version!r} unsupported (expected {SCAN_LOG_VERSION})"
                    )
            elif kind == "trajectory":
                try:
                    samples.append(
                        TrajectorySample(
                            float(record["t_s"]), float(record["x_m"]), float(record["y_m"])
                        )
                    )
                except (KeyError, TypeError, ValueError) as exc:
                    raise MotionFormatError(f"scan log line {lineno}: bad trajectory record") from exc
            elif kind == "snapshot":
                try:
                    detections = tuple(
                        Detection(
                            object_id=str(d["object_id"]),
                            pose_6dof=Pose6DoF(
                                tuple(d["pose_6dof"]["position"]),
                                tuple(d["pose_6dof"]["quaternion"]),
                            ),
                            confidence=float(d["confidence"]),
                        )
                        for d in record.get("detections", [])
                    )
                    events.append(SnapshotEvent(t_s=float(record["t_s"]), detections=detections))
                except (KeyError, TypeError, ValueError) as exc:
                    raise MotionFormatError(f"scan log line {lineno}: bad snapshot record") from exc
            else:
                raise MotionFormatError(f"scan log line {lineno}: unknown record type {kind!r}")
        return cls(trajectory_samples=tuple(samples), snapshot_events=tuple(events))

    @classmethod
    def load(cls, path: str | Path) -> "ScanLog":
        return cls.from_jsonl(Path(path).read_text(encoding="utf-8"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")


def detection_to_keypoint(det: Detection) -> Keypoint:
    x, y, _ = det.pose_6dof.position
    return Keypoint(x_m=x, y_m=y, object_id=det.object_id, pose_6dof=det.pose_6dof)


# ---------------------------------------------------------------------------
# Instruction refinement client
# ---------------------------------------------------------------------------

class InstructionClientError(RuntimeError):
    """Instruction client failed; the request is safe to retry."""


class InstructionClient(Protocol):
    def refine(self, task_text: str) -> list[str]: ...


def parse_instruction_lines(text: str) -> list[str]:
    """Turn an LLM-ish response into a clean ordered list of step texts."""
    steps: list[str] = []
    for raw in text.replace(";", "\n").splitlines():
        line = raw.strip().strip("-*").strip()
        # drop "1." / "Step 2:" style prefixes
        while line and (line[0].isdigit() or line[:4].lower() == "step"):
            head, _, rest = line.partition(" ")
            if head.rstrip(".):").isdigit() or head.lower().rstrip(".:)") == "step":
                line = rest.strip()
            else:
                break
        line = line.strip(".")
        if line:
            steps.append(line)
    if not steps:
        raise InstructionClientError("response contained no parseable steps")
    return steps


class MockInstructionClient:
    """Deterministic fixture-table client; the default for tests and demos.

    Known task names answer with the shipped scenario scripts; anything else
    gets a deterministic generic three-step script so the mock never fails.
    """

    def __init__(self, table: dict[str, list[str]] | None = None):
        if table is None:
            from .scenarios import instruction_table

            table = instruction_table()
        self._table = {k.strip().lower(): list(v) for k, v in table.items()}

    def refine(self, task_text: str) -> list[str]:
        if not task_text or not task_text.strip():
            raise ValidationError("task text must be non-empty")
        key = task_text.strip().lower()
        if key in self._table:
            return list(self._table[key])
        task = task_text.strip()
        return [f"Prepare for {task}", f"Perform {task}", f"Finish {task}"]


class HttpInstructionClient:
    """Chat-completions client configured by environment variables.

    MOTIONLOOM_LLM_URL, MOTIONLOOM_LLM_API_KEY, MOTIONLOOM_LLM_MODEL. Never
    used by tests; network failures surface as InstructionClientError with
    retry advice.
    """

    def __init__(
        self,
        url: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        timeout_s: float = 30.0,
    ):
        self.url = url or os.environ.get("MOTIONLOOM_LLM_URL", "")
        self.api_key = api_key or os.environ.get("MOTIONLOOM_LLM_API_KEY", "")
        self.model = model or os.environ.get("MOTIONLOOM_LLM_MODEL", "")
        self.timeout_s = timeout_s
        if not self.url:
            raise InstructionClientError(
                "no endpoint configured; set MOTIONLOOM_LLM_URL or use the mock client"
            )

    def refine(self, task_text: str) -> list[str]:
        if not task_text or not task_text.strip():
            raise ValidationError("task text must be non-empty")
        body = json.dumps(
            {
                "model": self.model,
                "messages": [
                    {
                        "role": "user",
                        "content": f"detailed step-by-step instructions of the {task_text}",
                    }
                ],
            }
        ).encode("utf-8")
        request = urllib.request.Request(
            self.url,
            data=body,
            headers={
                "Content-Type": "application/json",
                "Authorization": f"Bearer {self.api_key}",
            },
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout_s) as response:
                payload = json.loads(response.read().decode("utf-8"))
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            raise InstructionClientError(
                f"instruction endpoint unreachable ({exc}); retry once the network is back"
            ) from exc
        except json.JSONDecodeError as exc:
            raise InstructionClientError(f"unparseable response: {exc}") from exc
        try:
            content = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise InstructionClientError(f"unexpected response shape: {exc}") from exc
        return parse_instruction_lines(content)


def refine_instructions(task_text: str, client: InstructionClient) -> list[str]:
    if not task_text or not task_text.strip():
        raise ValidationError("task text must be non-empty")
    steps = client.refine(task_text)
    cleaned = [s.strip() for s in steps if s and s.strip()]
    if not cleaned:
        raise InstructionClientError("client returned no steps")
    return cleaned


# ---------------------------------------------------------------------------
# Generation plan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlanStep:
    text: str
    frame_range: tuple[int, int]
    scale: RenderScale
    trajectory: Trajectory
    target: Keypoint | None = None

    @property
    def n_frames(self) -> int:
        return self.frame_range[1] - self.frame_range[0]

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "frame_range": list(self.frame_range),
            "scale": self.scale.value,
            "trajectory": self.trajectory.to_dict(),
            "target": None if self.target is None else self.target.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlanStep":
        return cls(
            text=str(data["text"]),
            frame_range=(int(data["frame_range"][0]), int(data["frame_range"][1])),
            scale=RenderScale(data.get("scale", "full_body")),
            trajectory=Trajectory.from_dict(data["trajectory"]),
            target=None if data.get("target") is None else Keypoint.from_dict(data["target"]),
        )


@dataclass(frozen=True)
class GenerationPlan:
    steps: tuple[PlanStep, ...]
    fps: float = DEFAULT_FPS
    skeleton: Skeleton = Skeleton()
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        steps = tuple(self.steps)
        if not steps:
            raise ValidationError("plan needs at least one step")
        cursor = 0
        for step in steps:
            a, b = step.frame_range
            if a != cursor or b <= a:
                raise ValidationError(
                    f"plan frame ranges must be contiguous from 0; got [{a}, {b}) at {cursor}"
                )
            cursor = b
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @property
    def total_frames(self) -> int:
        return self.steps[-1].frame_range[1]

    @property
    def boundaries(self) -> tuple[int, ...]:
        return tuple(s.frame_range[0] for s in self.steps[1:])

    def to_dict(self) -> dict:
        return {
            "fps": self.fps,
            "skeleton": self.skeleton.to_dict(),
            "warnings": list(self.warnings),
            "steps": [s.to_dict() for s in self.steps],
        }

    def dumps(self) -> str:
        return canonical_dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "GenerationPlan":
        return cls(
            steps=tuple(PlanStep.from_dict(s) for s in data["steps"]),
            fps=float(data.get("fps", DEFAULT_FPS)),
            skeleton=Skeleton.from_dict(data["skeleton"]) if "skeleton" in data else Skeleton(),
            warnings=tuple(str(w) for w in data.get("warnings", ())),
        )

    @classmethod
    def load(cls, path: str | Path) -> "GenerationPlan":
        try:
            return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise MotionFormatError(f"bad plan file: {exc}") from exc

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")


def slice_trajectory(traj: Trajectory, k: int, parts: int) -> Trajectory:
    """Piece k of the path split into `parts` equal arc-length spans.

    Cut points are interpolated on the polyline; original interior waypoints
    are kept. Timestamps at the cuts are interpolated from the source times.
    """
    if parts < 1 or not 0 <= k < parts:
        raise ValidationError(f"invalid slice {k}/{parts}")
    pts = traj.points()
    times = np.array([s.t_s for s in traj.samples])
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    lo, hi = total * k / parts, total * (k + 1) / parts

    def at(arc: float) -> TrajectorySample:
        x = float(np.interp(arc, s, pts[:, 0]))
        y = float(np.interp(arc, s, pts[:, 1]))
        t = float(np.interp(arc, s, times))
        return TrajectorySample(t, x, y)

    if total == 0.0:
        # degenerate walk: every slice is the full (station-keeping) path
        return traj
    samples = [at(lo)]
    for arc, sample in zip(s, traj.samples):
        if lo < arc < hi:
            samples.append(sample)
    samples.append(at(hi))
    kept = [samples[0]]
    for sample in samples[1:]:
        if sample.t_s > kept[-1].t_s:
            kept.append(sample)
    if len(kept) < 2:
        # zero-length span: synthesize a second sample so guidance still works
        first = kept[0]
        kept.append(TrajectorySample(first.t_s + 1e-6, first.x_m, first.y_m))
    return Trajectory(samples=tuple(kept), frame_of_reference=traj.frame_of_reference)


def match_keypoint(step_text: str, snapshot: Sequence[Keypoint]) -> Keypoint | None:
    """First snapshot object whose id occurs in the step text (case-insensitive)."""
    lowered = step_text.lower()
    for kp in snapshot:
        if kp.object_id.lower() in lowered:
            return kp
    return None


# ---------------------------------------------------------------------------
# Project
# ---------------------------------------------------------------------------

class Project:
    """Mutable authoring state. Callers must serialize writes (single writer)."""

    def __init__(self, project_id: str = "p1"):
        self.id = project_id
        self.task_text: str = ""
        self.steps: list[InstructionStep] = []
        self.groups: list[ContextGroup] = []
        self._next_step = 1
        self._next_group = 1

    # -- lookups -------------------------------------------------------------

    def step(self, step_id: str) -> InstructionStep:
        for s in self.steps:
            if s.id == step_id:
                return s
        raise UnknownIdError(f"unknown step id {step_id!r}")

    def group(self, group_id: str) -> ContextGroup:
        for g in self.groups:
            if g.id == group_id:
                return g
        raise UnknownIdError(f"unknown group id {group_id!r}")

    def group_of(self, step_id: str) -> ContextGroup | None:
        for g in self.groups:
            if step_id in g.step_ids:
                return g
        return None

    def draft_step_ids(self) -> list[str]:
        return [s.id for s in self.steps if s.status is StepStatus.DRAFT]

    # -- script editing ------------------------------------------------------

    def set_task(self, task_text: str, client: InstructionClient) -> list[InstructionStep]:
        """Refine the task into steps, replacing any existing script."""
        texts = refine_instructions(task_text, client)
        self.task_text = task_text.strip()
        self.steps = []
        self.groups = []
        for text in texts:
            self.insert_step(text)
        return list(self.steps)

    def insert_step(
        self,
        text: str,
        index: int | None = None,
        scale: RenderScale = RenderScale.FULL_BODY,
    ) -> InstructionStep:
        if not text or not text.strip():
            raise ValidationError("step text must be non-empty")
        step = InstructionStep(id=f"s{self._next_step}", text=text.strip(), scale=scale)
        self._next_step += 1
        if index is None:
            self.steps.append(step)
        else:
            if not 0 <= index <= len(self.steps):
                raise ValidationError(f"insert index {index} outside [0, {len(self.steps)}]")
            self.steps.insert(index, step)
        return step

    def edit_step(
        self,
        step_id: str,
        text: str | None = None,
        scale: RenderScale | None = None,
    ) -> InstructionStep:
        step = self.step(step_id)
        if text is not None:
            if not text.strip():
                raise ValidationError("step text must be non-empty")
            if text.strip() != step.text:
                step.text = text.strip()
                # the spatial context was authored against the old text
                step.status = StepStatus.DRAFT
        if scale is not None:
            step.scale = scale
        return step

    def delete_step(self, step_id: str) -> list[str]:
        """Remove a step; returns human-readable notices (e.g. group detach)."""
        step = self.step(step_id)
        notices = []
        group = self.group_of(step_id)
        if group is not None:
            group.step_ids.remove(step_id)
            notices.append(f"step {step_id} detached from group {group.id}")
            if not group.step_ids:
                self.groups.remove(group)
                notices.append(f"group {group.id} removed (empty)")
        self.steps.remove(step)
        return notices

    # -- grouping and scanning -------------------------------------------------

    def create_group(self, step_ids: Sequence[str]) -> ContextGroup:
        ids = [str(s) for s in step_ids]
        if not ids:
            raise ValidationError("a group needs at least one step")
        seen = set()
        for sid in ids:
            self.step(sid)  # raises UnknownIdError
            if sid in seen:
                raise ValidationError(f"step {sid} listed twice")
            seen.add(sid)
            other = self.group_of(sid)
            if other is not None:
                raise ValidationError(f"step {sid} already belongs to group {other.id}")
        # normalize to script order
        order = {s.id: i for i, s in enumerate(self.steps)}
        ids.sort(key=order.__getitem__)
        group = ContextGroup(id=f"g{self._next_group}", step_ids=ids)
        self._next_group += 1
        self.groups.append(group)
        return group

    def ingest_scan(self, group_id: str, log: ScanLog) -> list[str]:
        """Attach the walk and the last snapshot's detections to the group.

        Member steps become contextualized. Returns warnings (e.g. a log with
        no snapshot stores trajectory-only context).
        """
        group = self.group(group_id)
        trajectory = log.trajectory()  # raises if < 2 usable samples
        warnings: list[str] = []
        if log.snapshot_events:
            last = log.snapshot_events[-1]
            group.snapshot = [detection_to_keypoint(d) for d in last.detections]
        else:
            group.snapshot = []
            warnings.append(
                f"scan log for group {group_id} has no snapshot event; "
                "stored trajectory-only context"
            )
        group.trajectory = trajectory
        for sid in group.step_ids:
            self.step(sid).status = StepStatus.CONTEXTUALIZED
        return warnings

    # -- compilation -----------------------------------------------------------

    def compile_plan(
        self,
        frames_per_step: int = DEFAULT_FRAMES_PER_STEP,
        fps: float = DEFAULT_FPS,
        skeleton: Skeleton | None = None,
    ) -> GenerationPlan:
        if not self.steps:
            raise ValidationError("project has no steps")
        drafts = self.draft_step_ids()
        if drafts:
            raise UncontextualizedError(drafts)
        if frames_per_step < 2:
            raise ValidationError("frames_per_step must be >= 2")
        total = frames_per_step * len(self.steps)
        if total > PLAN_HARD_FRAME_CAP:
            raise ValidationError(
                f"plan of {total} frames exceeds the hard cap of {PLAN_HARD_FRAME_CAP}"
            )
        warnings = []
        if total > QUALITY_FRAME_CAP:
            warnings.append(
                f"plan spans {total} frames, beyond the {QUALITY_FRAME_CAP}-frame "
                "quality cap; expect degraded motion quality"
            )
        plan_steps = []
        for i, step in enumerate(self.steps):
            group = self.group_of(step.id)
            if group is None or group.trajectory is None:
                raise UncontextualizedError([step.id])
            k = group.step_ids.index(step.id)
            plan_steps.append(
                PlanStep(
                    text=step.text,
                    frame_range=(i * frames_per_step, (i + 1) * frames_per_step),
                    scale=step.scale,
                    trajectory=slice_trajectory(group.trajectory, k, len(group.step_ids)),
                    target=match_keypoint(step.text, group.snapshot),
                )
            )
        return GenerationPlan(
            steps=tuple(plan_steps),
            fps=fps,
            skeleton=skeleton or Skeleton(),
            warnings=tuple(warnings),
        )

    # -- serialization -----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "task_text": self.task_text,
            "steps": [s.to_dict() for s in self.steps],
            "groups": [g.to_dict() for g in self.groups],
            "next_step": self._next_step,
            "next_group": self._next_group,
        }

    def dumps(self) -> str:
        return canonical_dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Project":
        project = cls(project_id=str(data["id"]))
        project.task_text = str(data.get("task_text", ""))
        project.steps = [InstructionStep.from_dict(s) for s in data.get("steps", [])]
        project.groups = [ContextGroup.from_dict(g) for g in data.get("groups", [])]
        project._next_step = int(data.get("next_step", len(project.steps) + 1))
        project._next_group = int(data.get("next_group", len(project.groups) + 1))
        return project

    @classmethod
    def loads(cls, text: str) -> "Project":
        try:
            return cls.from_dict(json.loads(text))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise MotionFormatError(f"bad project payload: {exc}") from exc
