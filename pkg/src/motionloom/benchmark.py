"""Randomized clip-pair suite with injected boundary jumps.

Each instance is a pair of gently moving clips whose junction carries a known
root offset between 0.1 and 1.0 m, the regime where temporal smoothing should
always beat naive concatenation. The suite is fully determined by its seed,
so benchmark numbers are reproducible from the repository alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MotionClip, Skeleton, concat
from .metrics import TransitionSpec, transition_distance
from .smoothing import BlendConfig, stitch

SUITE_SEED = 90210
JUMP_RANGE_M = (0.1, 1.0)


@dataclass(frozen=True)
class SuiteInstance:
    first: MotionClip
    second: MotionClip
    jump_m: float


def _gentle_clip(
    rng: np.random.Generator,
    skeleton: Skeleton,
    n_frames: int,
    fps: float,
    origin: np.ndarray,
) -> MotionClip:
    """Slow sinusoidal joint motion around a drifting root; small per-frame deltas."""
    t = np.arange(n_frames) / fps
    joints = skeleton.joint_count
    base = rng.uniform(-0.3, 0.3, size=(joints, 3))
    amp = rng.uniform(0.02, 0.06, size=(joints, 3))
    freq = rng.uniform(0.3, 0.9, size=(joints, 3))
    phase = rng.uniform(0, 2 * np.pi, size=(joints, 3))
    wave = amp[None] * np.sin(2 * np.pi * freq[None] * t[:, None, None] + phase[None])
    drift_v = rng.uniform(-0.3, 0.3, size=3) / fps
    drift = np.arange(n_frames)[:, None] * drift_v[None, :]
    frames = origin[None, None, :] + base[None] + wave + drift[:, None, :]
    return MotionClip(skeleton=skeleton, fps=fps, frames=frames, label="suite")


def make_pair(
    rng: np.random.Generator,
    joints: int = 5,
    n_frames: int = 60,
    fps: float = 20.0,
) -> SuiteInstance:
    skeleton = Skeleton.stick(joints)
    jump = rng.uniform(*JUMP_RANGE_M)
    theta = rng.uniform(0, 2 * np.pi)
    offset = np.array([jump * np.cos(theta), jump * np.sin(theta), 0.0])
    first = _gentle_clip(rng, skeleton, n_frames, fps, origin=np.zeros(3))
    second = _gentle_clip(rng, skeleton, n_frames, fps, origin=np.zeros(3))
    # land the second clip so its first frame sits exactly `jump` away from
    # the first clip's last frame (per-joint mean offset)
    gap = first.frames[-1] - second.frames[0]
    second = second.replace(frames=second.frames + gap[None] + offset[None, None, :])
    return SuiteInstance(first=first, second=second, jump_m=jump)


def smoothing_suite(n: int = 50, seed: int = SUITE_SEED) -> list[SuiteInstance]:
    rng = np.random.Generator(np.random.PCG64(seed))
    return [make_pair(rng) for _ in range(n)]


@dataclass(frozen=True)
class SuiteResult:
    jump_m: float
    naive_m: float
    smoothed_m: float

    @property
    def ratio(self) -> float:
        return self.naive_m / self.smoothed_m if self.smoothed_m > 0 else float("inf")


def evaluate_instance(instance: SuiteInstance, cfg: BlendConfig | None = None) -> SuiteResult:
    cfg = cfg or BlendConfig()
    clips = [instance.first, instance.second]
    naive = concat(clips)
    smoothed = stitch(clips, cfg)
    spec = TransitionSpec.from_clip(naive)
    return SuiteResult(
        jump_m=instance.jump_m,
        naive_m=transition_distance(naive, spec),
        smoothed_m=transition_distance(smoothed, spec),
    )


def run_suite(n: int = 50, seed: int = SUITE_SEED, cfg: BlendConfig | None = None) -> list[SuiteResult]:
    return [evaluate_instance(inst, cfg) for inst in smoothing_suite(n, seed)]
