"""Root-trajectory guidance: turn an authored walk into per-frame targets and
softly pull a generated clip's root path onto them.

The correction is a rigid per-frame X/Y shift of every joint, so limb poses
are untouched and Z is never modified. Guidance strength ramps linearly from
0 at the first frame to 1 at the last by default, which keeps the generated
motion's own character early on while guaranteeing the final frame lands
exactly on target.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import MotionClip, Trajectory, ValidationError


@dataclass(frozen=True, eq=False)
class GuidanceTargets:
    """Per-frame ground-plane root targets plus a per-frame strength in [0, 1]."""

    per_frame_xy: np.ndarray
    strength: np.ndarray

    def __post_init__(self) -> None:
        xy = np.array(self.per_frame_xy, dtype=float, copy=True)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise ValidationError(f"targets must be (n, 2), got {xy.shape}")
        if not np.all(np.isfinite(xy)):
            raise ValidationError("targets contain non-finite coordinates")
        s = np.array(self.strength, dtype=float, copy=True)
        if s.shape != (xy.shape[0],):
            raise ValidationError(f"strength shape {s.shape} != ({xy.shape[0]},)")
        if np.any(s < 0) or np.any(s > 1):
            raise ValidationError("strength values must lie in [0, 1]")
        xy.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "per_frame_xy", xy)
        object.__setattr__(self, "strength", s)

    @property
    def n_frames(self) -> int:
        return int(self.per_frame_xy.shape[0])


def ramp_strength(n_frames: int) -> np.ndarray:
    """Linear 0 -> 1 schedule over the clip."""
    return np.linspace(0.0, 1.0, n_frames)


def full_strength(n_frames: int) -> np.ndarray:
    return np.ones(n_frames)


def resample_trajectory(
    traj: Trajectory,
    n_frames: int,
    strength: np.ndarray | Sequence[float] | str = "ramp",
) -> GuidanceTargets:
    """Resample a walked path to n_frames points uniform in arc length.

    The first and last targets coincide with the trajectory endpoints. A
    degenerate path (zero total arc length) yields constant targets at the
    single point. strength may be "ramp" (default), "full", or an explicit
    per-frame array.
    """
    if len(traj.samples) < 2:
        raise ValidationError("trajectory needs at least 2 samples for guidance")
    if n_frames < 2:
        raise ValidationError(f"need at least 2 frames, got {n_frames}")
    pts = traj.points()
    # zero-length segments carry no arc and break the interpolation grid
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    keep = np.concatenate([[True], seg > 0.0])
    pts = pts[keep]
    if pts.shape[0] < 2:
        xy = np.tile(pts[0], (n_frames, 1))
    else:
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        s = np.concatenate([[0.0], np.cumsum(seg)])
        s_new = np.linspace(0.0, s[-1], n_frames)
        xy = np.stack(
            [np.interp(s_new, s, pts[:, 0]), np.interp(s_new, s, pts[:, 1])], axis=1
        )
        xy[0] = pts[0]
        xy[-1] = pts[-1]
    if isinstance(strength, str):
        if strength == "ramp":
            s_arr = ramp_strength(n_frames)
        elif strength == "full":
            s_arr = full_strength(n_frames)
        else:
            raise ValidationError(f"unknown strength schedule {strength!r}")
    else:
        s_arr = np.asarray(strength, dtype=float)
    return GuidanceTargets(per_frame_xy=xy, strength=s_arr)


def apply_root_guidance(clip: MotionClip, targets: GuidanceTargets) -> MotionClip:
    """Shift each frame rigidly in X/Y toward its target root position.

    Per frame t every joint receives the same correction
    strength[t] * (target[t] - root_xy[t]), so intra-frame joint offsets are
    preserved exactly. Wherever strength is 1 the root lands on the target.
    """
    if targets.n_frames != clip.n_frames:
        raise ValidationError(
            f"targets cover {targets.n_frames} frames but clip has {clip.n_frames}"
        )
    delta = targets.strength[:, None] * (targets.per_frame_xy - clip.root_xy())
    frames = np.array(clip.frames, copy=True)
    frames[:, :, :2] += delta[:, None, :]
    return clip.replace(frames=frames)
