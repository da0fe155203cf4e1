"""Motion quality metrics: temporal transition distance and spatial alignment.

transition_distance measures the mean per-joint 3D jump across action
boundaries (last frame of one action vs first frame of the next). Lower is
smoother. spatial_distance measures the mean ground-plane (X, Y) distance
between the root joint and a target keypoint over the conditioned frames.
Distances under 0.1 m count as plausible placement.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .core import Keypoint, MotionClip, MotionFormatError, ValidationError, canonical_dumps

PLAUSIBLE_DISTANCE_M = 0.1


@dataclass(frozen=True)
class TransitionSpec:
    """Which adjacent frame pairs are action boundaries: (last, first) pairs."""

    boundaries: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        pairs = tuple((int(a), int(b)) for a, b in self.boundaries)
        for a, b in pairs:
            if a < 0 or b != a + 1:
                raise ValidationError(f"boundary pair {(a, b)} is not adjacent (i, i+1)")
        object.__setattr__(self, "boundaries", pairs)

    @classmethod
    def from_boundaries(cls, first_frames: Sequence[int]) -> "TransitionSpec":
        """Build from boundary metadata (first frame of each following action)."""
        return cls(tuple((int(b) - 1, int(b)) for b in first_frames))

    @classmethod
    def from_clip(cls, clip: MotionClip) -> "TransitionSpec":
        return cls.from_boundaries(clip.boundaries)


@dataclass(frozen=True)
class SpatialSpec:
    """Target keypoints per conditioned frame index."""

    targets: tuple[tuple[int, Keypoint], ...]

    def __post_init__(self) -> None:
        targets = tuple((int(t), kp) for t, kp in self.targets)
        for t, _ in targets:
            if t < 0:
                raise ValidationError(f"conditioned frame index {t} is negative")
        object.__setattr__(self, "targets", targets)

    @property
    def conditioned_frames(self) -> tuple[int, ...]:
        return tuple(t for t, _ in self.targets)


def transition_distance(clip: MotionClip, spec: TransitionSpec) -> float:
    """Mean 3D joint displacement across the specified boundaries, in meters."""
    if not spec.boundaries:
        raise ValidationError("transition spec has no boundaries")
    n = clip.n_frames
    for a, b in spec.boundaries:
        if b >= n:
            raise ValidationError(f"boundary pair {(a, b)} outside clip of {n} frames")
    total = 0.0
    for a, b in spec.boundaries:
        jumps = np.linalg.norm(clip.frames[a] - clip.frames[b], axis=1)
        total += float(np.sum(jumps))
    return total / (len(spec.boundaries) * clip.skeleton.joint_count)


def spatial_distance(clip: MotionClip, spec: SpatialSpec) -> float:
    """Mean ground-plane distance from the root joint to its target, in meters.

    Only X and Y enter the distance; Z is ignored entirely.
    """
    if not spec.targets:
        raise ValidationError("spatial spec has no conditioned frames")
    n = clip.n_frames
    root = clip.skeleton.root_index
    total = 0.0
    for t, keypoint in spec.targets:
        if t >= n:
            raise ValidationError(f"conditioned frame {t} outside clip of {n} frames")
        total += float(np.linalg.norm(clip.frames[t, root, :2] - keypoint.xy()))
    return total / len(spec.targets)


@dataclass(frozen=True)
class VariantMetrics:
    """Metric values for one variant; None where the metric is undefined
    (no boundaries / no spatial targets)."""

    transition_m: float | None
    spatial_m: float | None

    def to_dict(self) -> dict:
        return {"transition_m": self.transition_m, "spatial_m": self.spatial_m}


@dataclass(frozen=True)
class MetricsReport:
    """Before/after comparison of a naive concatenation and its smoothed form."""

    naive: VariantMetrics
    smoothed: VariantMetrics
    ratio: float | None
    plausible: bool | None

    def to_dict(self) -> dict:
        # strict JSON has no infinity; encode it as the string "inf"
        ratio: float | str | None = self.ratio
        if ratio is not None and math.isinf(ratio):
            ratio = "inf"
        return {
            "naive": self.naive.to_dict(),
            "smoothed": self.smoothed.to_dict(),
            "ratio": ratio,
            "plausible": self.plausible,
        }

    def dumps(self) -> str:
        return canonical_dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "MetricsReport":
        def variant(raw: Mapping) -> VariantMetrics:
            transition = raw.get("transition_m")
            spatial = raw.get("spatial_m")
            return VariantMetrics(
                transition_m=None if transition is None else float(transition),
                spatial_m=None if spatial is None else float(spatial),
            )

        try:
            ratio = data["ratio"]
            return cls(
                naive=variant(data["naive"]),
                smoothed=variant(data["smoothed"]),
                ratio=None if ratio is None else float(ratio),
                plausible=data["plausible"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MotionFormatError(f"bad metrics report payload: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> "MetricsReport":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise MotionFormatError(f"not valid JSON: {exc}") from exc


def report(
    clip_before: MotionClip,
    clip_after: MotionClip,
    transitions: TransitionSpec | None = None,
    spatial: SpatialSpec | None = None,
) -> MetricsReport:
    """Evaluate both metrics on the naive and smoothed variants of a motion.

    ratio is naive transition distance over smoothed transition distance
    (> 1 means smoothing helped). plausible reports whether the smoothed
    variant keeps its root within 0.1 m of the targets, or None when no
    spatial targets were given.
    """
    if clip_before.boundaries != clip_after.boundaries:
        raise ValidationError(
            f"variants disagree on boundaries: {clip_before.boundaries} vs "
            f"{clip_after.boundaries}"
        )
    if transitions is None and clip_before.boundaries:
        transitions = TransitionSpec.from_clip(clip_before)
    if transitions is not None:
        before_t: float | None = transition_distance(clip_before, transitions)
        after_t: float | None = transition_distance(clip_after, transitions)
        if after_t > 0:
            ratio: float | None = before_t / after_t
        else:
            ratio = 1.0 if before_t == 0 else float("inf")
    else:
        # a single-action motion has no transitions to measure
        before_t = after_t = ratio = None
    before_s = spatial_distance(clip_before, spatial) if spatial else None
    after_s = spatial_distance(clip_after, spatial) if spatial else None
    plausible = None if after_s is None else bool(after_s < PLAUSIBLE_DISTANCE_M)
    return MetricsReport(
        naive=VariantMetrics(before_t, before_s),
        smoothed=VariantMetrics(after_t, after_s),
        ratio=ratio,
        plausible=plausible,
    )


def save_report(rep: MetricsReport, path: str | Path) -> None:
    Path(path).write_text(rep.dumps(), encoding="utf-8")


def load_report(path: str | Path) -> MetricsReport:
    return MetricsReport.loads(Path(path).read_text(encoding="utf-8"))
