"""Skeleton and motion-clip data model, units, and file I/O.

Units are meters throughout. The coordinate frame is Z-up with X/Y as the
ground plane. A frame is a (joint_count, 3) array of joint positions; a clip
stacks frames at a fixed frame rate. All types are immutable values after
construction and every operation here is a pure function.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

DEFAULT_FPS = 20.0
DEFAULT_HEIGHT_M = 1.75

# First 22 joints of the SMPL body, the usual skeleton for position-based
# humanoid motion data.
JOINT_NAMES_22 = (
    "pelvis",
    "left_hip",
    "right_hip",
    "spine1",
    "left_knee",
    "right_knee",
    "spine2",
    "left_ankle",
    "right_ankle",
    "spine3",
    "left_foot",
    "right_foot",
    "neck",
    "left_collar",
    "right_collar",
    "head",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
)


class MotionFormatError(ValueError):
    """A motion/trajectory file could not be parsed."""


class ValidationError(ValueError):
    """A value violates a structural invariant."""


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


@dataclass(frozen=True)
class Skeleton:
    """Joint topology and metric scale shared by all frames of a clip."""

    joint_names: tuple[str, ...] = JOINT_NAMES_22
    root_index: int = 0
    height_m: float = DEFAULT_HEIGHT_M

    def __post_init__(self) -> None:
        object.__setattr__(self, "joint_names", tuple(self.joint_names))
        _require(len(self.joint_names) >= 1, "skeleton needs at least one joint")
        _require(
            0 <= self.root_index < len(self.joint_names),
            f"root_index {self.root_index} out of range for "
            f"{len(self.joint_names)} joints",
        )
        _require(self.height_m > 0, "height_m must be positive")

    @property
    def joint_count(self) -> int:
        return len(self.joint_names)

    @classmethod
    def point(cls) -> "Skeleton":
        """Single-joint skeleton used by toy generation experiments."""
        return cls(joint_names=("root",))

    @classmethod
    def stick(cls, joint_count: int) -> "Skeleton":
        """Generic n-joint skeleton with synthetic joint names."""
        if joint_count == 22:
            return cls()
        if joint_count == 1:
            return cls.point()
        names = ("root",) + tuple(f"joint_{i}" for i in range(1, joint_count))
        return cls(joint_names=names)

    def to_dict(self) -> dict:
        return {
            "joint_names": list(self.joint_names),
            "root_index": self.root_index,
            "height_m": self.height_m,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Skeleton":
        try:
            return cls(
                joint_names=tuple(data["joint_names"]),
                root_index=int(data["root_index"]),
                height_m=float(data["height_m"]),
            )
        except KeyError as exc:
            raise MotionFormatError(f"skeleton missing field {exc}") from exc


def _freeze_array(values, shape_tail: tuple[int, ...] | None, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if shape_tail is not None and arr.shape[1:] != shape_tail:
        raise ValidationError(f"{what} has shape {arr.shape}, expected (*, {shape_tail})")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} contains non-finite coordinates")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MotionClip:
    """A timed sequence of skeleton poses.

    frames has shape (n_frames, joint_count, 3). boundaries records the frame
    indices where concatenated source clips met (index of the first frame of
    each following clip), kept purely as metadata for the metrics module.
    """

    skeleton: Skeleton
    fps: float
    frames: np.ndarray
    label: str = ""
    boundaries: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        _require(self.fps > 0, "fps must be positive")
        arr = np.array(self.frames, dtype=float, copy=True)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValidationError(
                f"frames must have shape (n_frames, joints, 3), got {arr.shape}"
            )
        if arr.shape[0] < 1:
            raise ValidationError("a clip needs at least one frame")
        if arr.shape[1] != self.skeleton.joint_count:
            raise ValidationError(
                f"frame joint count {arr.shape[1]} != skeleton joint count "
                f"{self.skeleton.joint_count}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError("frames contain non-finite coordinates")
        arr.setflags(write=False)
        object.__setattr__(self, "frames", arr)
        bounds = tuple(int(b) for b in self.boundaries)
        for b in bounds:
            _require(0 < b < arr.shape[0], f"boundary {b} outside (0, {arr.shape[0]})")
        _require(list(bounds) == sorted(set(bounds)), "boundaries must be strictly increasing")
        object.__setattr__(self, "boundaries", bounds)

    @property
    def n_frames(self) -> int:
        return int(self.frames.shape[0])

    @property
    def duration_s(self) -> float:
        return self.n_frames / self.fps

    def root_xy(self) -> np.ndarray:
        """(n_frames, 2) ground-plane path of the root joint."""
        return self.frames[:, self.skeleton.root_index, :2]

    def replace(self, **changes) -> "MotionClip":
        fields = {
            "skeleton": self.skeleton,
            "fps": self.fps,
            "frames": self.frames,
            "label": self.label,
            "boundaries": self.boundaries,
        }
        fields.update(changes)
        return MotionClip(**fields)


def structurally_equal(a: MotionClip, b: MotionClip, atol: float = 0.0) -> bool:
    """Exact (or atol-bounded) structural comparison of two clips."""
    if a.skeleton != b.skeleton or a.fps != b.fps:
        return False
    if a.label != b.label or a.boundaries != b.boundaries:
        return False
    if a.frames.shape != b.frames.shape:
        return False
    if atol == 0.0:
        return bool(np.array_equal(a.frames, b.frames))
    return bool(np.allclose(a.frames, b.frames, rtol=0.0, atol=atol))


class TrajectorySample(NamedTuple):
    t_s: float
    x_m: float
    y_m: float


@dataclass(frozen=True)
class Trajectory:
    """Timestamped 2D root waypoints recorded while the author walks."""

    samples: tuple[TrajectorySample, ...]
    frame_of_reference: str = "floor"

    def __post_init__(self) -> None:
        samples = tuple(TrajectorySample(float(t), float(x), float(y)) for t, x, y in self.samples)
        _require(len(samples) >= 1, "trajectory needs at least one sample")
        for s in samples:
            _require(all(math.isfinite(v) for v in s), "trajectory sample not finite")
        times = [s.t_s for s in samples]
        _require(all(b > a for a, b in zip(times, times[1:])), "trajectory timestamps must be strictly increasing")
        object.__setattr__(self, "samples", samples)

    def points(self) -> np.ndarray:
        return np.array([(s.x_m, s.y_m) for s in self.samples], dtype=float)

    def arc_length(self) -> float:
        pts = self.points()
        if len(pts) < 2:
            return 0.0
        return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))

    def to_dict(self) -> dict:
        return {
            "frame_of_reference": self.frame_of_reference,
            "samples": [{"t_s": s.t_s, "x_m": s.x_m, "y_m": s.y_m} for s in self.samples],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Trajectory":
        try:
            samples = tuple(
                TrajectorySample(float(s["t_s"]), float(s["x_m"]), float(s["y_m"]))
                for s in data["samples"]
            )
        except (KeyError, TypeError) as exc:
            raise MotionFormatError(f"bad trajectory payload: {exc}") from exc
        return cls(samples=samples, frame_of_reference=str(data.get("frame_of_reference", "floor")))


class Pose6DoF(NamedTuple):
    """Position plus unit quaternion (x, y, z, w)."""

    position: tuple[float, float, float]
    quaternion: tuple[float, float, float, float]


@dataclass(frozen=True)
class Keypoint:
    """A named target location on the ground plane, optionally with full pose."""

    x_m: float
    y_m: float
    object_id: str
    pose_6dof: Pose6DoF | None = None

    def __post_init__(self) -> None:
        _require(math.isfinite(self.x_m) and math.isfinite(self.y_m), "keypoint coordinates must be finite")
        _require(bool(self.object_id), "keypoint needs an object_id")
        if self.pose_6dof is not None:
            pose = Pose6DoF(
                tuple(float(v) for v in self.pose_6dof.position),
                tuple(float(v) for v in self.pose_6dof.quaternion),
            )
            norm = math.sqrt(sum(q * q for q in pose.quaternion))
            _require(abs(norm - 1.0) <= 1e-6, f"quaternion norm {norm} not unit within 1e-6")
            object.__setattr__(self, "pose_6dof", pose)

    def xy(self) -> np.ndarray:
        return np.array([self.x_m, self.y_m], dtype=float)

    def to_dict(self) -> dict:
        data: dict = {"x_m": self.x_m, "y_m": self.y_m, "object_id": self.object_id}
        if self.pose_6dof is not None:
            data["pose_6dof"] = {
                "position": list(self.pose_6dof.position),
                "quaternion": list(self.pose_6dof.quaternion),
            }
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Keypoint":
        pose = None
        if data.get("pose_6dof") is not None:
            raw = data["pose_6dof"]
            pose = Pose6DoF(tuple(raw["position"]), tuple(raw["quaternion"]))
        return cls(
            x_m=float(data["x_m"]),
            y_m=float(data["y_m"]),
            object_id=str(data["object_id"]),
            pose_6dof=pose,
        )


@dataclass(frozen=True, eq=False)
class TransitionSegment:
    """An L-frame window taken at a clip boundary, consumed by the blend."""

    frames: np.ndarray

    def __post_init__(self) -> None:
        arr = _freeze_array(self.frames, None, "transition segment")
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValidationError(f"segment frames must be (L, joints, 3), got {arr.shape}")
        _require(arr.shape[0] >= 1, "segment needs at least one frame")
        object.__setattr__(self, "frames", arr)

    @property
    def length(self) -> int:
        return int(self.frames.shape[0])


# ---------------------------------------------------------------------------
# Canonical motion file format (structured text / JSON)
# ---------------------------------------------------------------------------

def canonical_dumps(payload: dict) -> str:
    """Deterministic JSON text: sorted keys, 2-space indent, trailing newline.

    Floats round-trip exactly (shortest repr), so save -> load -> save is
    byte-stable.
    """
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def clip_to_dict(clip: MotionClip) -> dict:
    payload = {
        "fps": clip.fps,
        "skeleton": clip.skeleton.to_dict(),
        "label": clip.label,
        "frames": clip.frames.tolist(),
    }
    if clip.boundaries:
        payload["boundaries"] = list(clip.boundaries)
    return payload


def clip_from_dict(data: dict) -> MotionClip:
    if not isinstance(data, dict):
        raise MotionFormatError("motion payload must be an object")
    missing = [k for k in ("fps", "skeleton", "frames") if k not in data]
    if missing:
        raise MotionFormatError(f"motion payload missing fields: {', '.join(missing)}")
    skeleton = Skeleton.from_dict(data["skeleton"])
    return MotionClip(
        skeleton=skeleton,
        fps=float(data["fps"]),
        frames=np.array(data["frames"], dtype=float),
        label=str(data.get("label", "")),
        boundaries=tuple(int(b) for b in data.get("boundaries", ())),
    )


def dumps_motion(clip: MotionClip) -> str:
    return canonical_dumps(clip_to_dict(clip))


def loads_motion(text: str) -> MotionClip:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MotionFormatError(f"not valid JSON: {exc}") from exc
    try:
        return clip_from_dict(data)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (ValidationError, MotionFormatError)):
            raise
        raise MotionFormatError(f"malformed motion payload: {exc}") from exc


def load_motion(path: str | Path) -> MotionClip:
    return loads_motion(Path(path).read_text(encoding="utf-8"))


def save_motion(clip: MotionClip, path: str | Path) -> None:
    Path(path).write_text(dumps_motion(clip), encoding="utf-8")


def save_trajectory(traj: Trajectory, path: str | Path) -> None:
    Path(path).write_text(canonical_dumps(traj.to_dict()), encoding="utf-8")


def load_trajectory(path: str | Path) -> Trajectory:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MotionFormatError(f"not valid JSON: {exc}") from exc
    return Trajectory.from_dict(data)


def concat(clips: Sequence[MotionClip]) -> MotionClip:
    """Naive concatenation of clips, recording boundary indices as metadata.

    This is the unsmoothed baseline: frames are appended in order with no
    blending, so any pose mismatch at a junction survives as a one-frame jump.
    """
    clips = list(clips)
    if not clips:
        raise ValidationError("concat needs at least one clip")
    first = clips[0]
    for i, clip in enumerate(clips[1:], start=1):
        if clip.skeleton != first.skeleton:
            raise ValidationError(f"clip {i} skeleton differs from clip 0")
        if clip.fps != first.fps:
            raise ValidationError(f"clip {i} fps {clip.fps} != {first.fps}")
    if len(clips) == 1:
        return first
    frames = np.concatenate([c.frames for c in clips], axis=0)
    boundaries = tuple(np.cumsum([c.n_frames for c in clips[:-1]]).tolist())
    label = " / ".join(c.label for c in clips if c.label)
    return MotionClip(
        skeleton=first.skeleton,
        fps=first.fps,
        frames=frames,
        label=label,
        boundaries=boundaries,
    )
