"""Procedural synthetic motion datasets for training and testing.

Everything here is generated from a seed, so every number downstream of a
dataset (training losses, samples, benchmark results) is reproducible from
the repository alone.
"""

from __future__ import annotations

import numpy as np

from ..core import DEFAULT_FPS, MotionClip, Skeleton, ValidationError
from .model import MotionDataset

WALK_SPEED_MPS = 1.2  # comfortable indoor walking pace

# Standing rest pose for the 22-joint skeleton (meters, Z-up, facing +X),
# proportioned for a 1.75 m figure.
_REST_POSE_22 = np.array(
    [
        (0.00, 0.00, 0.95),   # pelvis
        (0.00, 0.09, 0.91),   # left_hip
        (0.00, -0.09, 0.91),  # right_hip
        (0.00, 0.00, 1.07),   # spine1
        (0.00, 0.10, 0.50),   # left_knee
        (0.00, -0.10, 0.50),  # right_knee
        (0.00, 0.00, 1.19),   # spine2
        (0.00, 0.11, 0.09),   # left_ankle
        (0.00, -0.11, 0.09),  # right_ankle
        (0.00, 0.00, 1.31),   # spine3
        (0.12, 0.11, 0.03),   # left_foot
        (0.12, -0.11, 0.03),  # right_foot
        (0.00, 0.00, 1.50),   # neck
        (0.00, 0.07, 1.44),   # left_collar
        (0.00, -0.07, 1.44),  # right_collar
        (0.00, 0.00, 1.62),   # head
        (0.00, 0.18, 1.42),   # left_shoulder
        (0.00, -0.18, 1.42),  # right_shoulder
        (0.00, 0.22, 1.16),   # left_elbow
        (0.00, -0.22, 1.16),  # right_elbow
        (0.00, 0.24, 0.92),   # left_wrist
        (0.00, -0.24, 0.92),  # right_wrist
    ]
)


def rest_pose(skeleton: Skeleton) -> np.ndarray:
    """A neutral standing pose for the skeleton, scaled to its height."""
    scale = skeleton.height_m / 1.75
    if skeleton.joint_count == 22:
        return _REST_POSE_22 * scale
    if skeleton.joint_count == 1:
        return np.zeros((1, 3))
    # generic stick figure: joints spaced evenly up the Z axis
    z = np.linspace(0.0, skeleton.height_m * 0.9, skeleton.joint_count)
    pose = np.zeros((skeleton.joint_count, 3))
    pose[:, 2] = z
    pose[[skeleton.root_index, 0]] = pose[[0, skeleton.root_index]]
    return pose


def two_class_dataset(
    n: int = 500,
    frames: int = 40,
    fps: float = DEFAULT_FPS,
    seed: int = 7,
    speed_mps: float = WALK_SPEED_MPS,
) -> MotionDataset:
    """Point-person motions labeled by the sign of their X velocity.

    "move right" walks toward +X, "move left" toward -X, both with mild
    per-clip speed variation and per-frame jitter.
    """
    if n < 2:
        raise ValidationError("need at least one clip per class")
    rng = np.random.Generator(np.random.PCG64(seed))
    skeleton = Skeleton.point()
    step = speed_mps / fps
    clips = []
    for i in range(n):
        direction = 1.0 if i % 2 == 0 else -1.0
        label = "move right" if direction > 0 else "move left"
        vx = direction * step * rng.uniform(0.8, 1.2)
        vel = np.zeros((frames, 3))
        vel[1:, 0] = vx + rng.normal(0.0, 0.1 * step, size=frames - 1)
        vel[1:, 1] = rng.normal(0.0, 0.05 * step, size=frames - 1)
        pos = np.cumsum(vel, axis=0)
        clips.append(
            MotionClip(skeleton=skeleton, fps=fps, frames=pos[:, None, :], label=label)
        )
    return MotionDataset(clips=tuple(clips))


_WALKER_LABELS = ("walk forward", "walk backward", "turn in place", "stand still")


def walker_dataset(
    n: int = 160,
    frames: int = 30,
    fps: float = DEFAULT_FPS,
    seed: int = 11,
) -> MotionDataset:
    """Full 22-joint procedural walker motions over four locomotion labels."""
    rng = np.random.Generator(np.random.PCG64(seed))
    skeleton = Skeleton()
    base = rest_pose(skeleton)
    gait_hz = 1.6
    clips = []
    for i in range(n):
        label = _WALKER_LABELS[i % len(_WALKER_LABELS)]
        if label == "walk forward":
            vx = WALK_SPEED_MPS / fps
        elif label == "walk backward":
            vx = -WALK_SPEED_MPS / fps
        else:
            vx = 0.0
        t = np.arange(frames) / fps
        phase = rng.uniform(0.0, 2 * np.pi)
        swing = 0.22 * np.sin(2 * np.pi * gait_hz * t + phase)
        moving = label in ("walk forward", "walk backward")
        amp = 1.0 if moving else 0.0

        poses = np.tile(base, (frames, 1, 1))
        # legs (knee/ankle/foot) swing along X in counter-phase; arms oppose legs
        left_leg = [4, 7, 10]
        right_leg = [5, 8, 11]
        left_arm = [18, 20]
        right_arm = [19, 21]
        poses[:, left_leg, 0] += amp * swing[:, None]
        poses[:, right_leg, 0] -= amp * swing[:, None]
        poses[:, left_arm, 0] -= 0.5 * amp * swing[:, None]
        poses[:, right_arm, 0] += 0.5 * amp * swing[:, None]
        # slight vertical bob at twice the stride frequency
        poses[:, :, 2] += amp * 0.02 * np.sin(4 * np.pi * gait_hz * t + phase)[:, None]

        if label == "turn in place":
            yaw = rng.choice([-1.0, 1.0]) * 0.9 * t  # rad/s
            cos, sin = np.cos(yaw), np.sin(yaw)
            rel = poses - poses[:, :1, :]
            x, y = rel[:, :, 0].copy(), rel[:, :, 1].copy()
            rel[:, :, 0] = cos[:, None] * x - sin[:, None] * y
            rel[:, :, 1] = sin[:, None] * x + cos[:, None] * y
            poses = poses[:, :1, :] + rel

        travel = np.zeros((frames, 3))
        travel[:, 0] = vx * np.arange(frames)
        poses = poses + travel[:, None, :]
        poses += rng.normal(0.0, 0.004, size=poses.shape)
        clips.append(MotionClip(skeleton=skeleton, fps=fps, frames=poses, label=label))
    return MotionDataset(clips=tuple(clips))


def make_dataset(task: str, n: int, seed: int, frames: int | None = None) -> MotionDataset:
    """Named dataset entry point used by the CLI."""
    if task == "two-class":
        return two_class_dataset(n=n, seed=seed, frames=frames or 40)
    if task == "walker":
        return walker_dataset(n=n, seed=seed, frames=frames or 30)
    raise ValidationError(f"unknown dataset task {task!r} (expected two-class or walker)")
