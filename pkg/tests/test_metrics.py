import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motionloom.core import Keypoint, ValidationError, concat
from motionloom.metrics import (
    MetricsReport,
    SpatialSpec,
    TransitionSpec,
    load_report,
    report,
    save_report,
    spatial_distance,
    transition_distance,
)
from motionloom.smoothing import BlendConfig, stitch
from conftest import make_clip, random_clip


# Independent oracles: plain-Python double loops, no numpy vector ops.

def brute_transition(clip, spec):
    total = 0.0
    for a, b in spec.boundaries:
        for j in range(clip.skeleton.joint_count):
            dx = clip.frames[a][j][0] - clip.frames[b][j][0]
            dy = clip.frames[a][j][1] - clip.frames[b][j][1]
            dz = clip.frames[a][j][2] - clip.frames[b][j][2]
            total += math.sqrt(dx * dx + dy * dy + dz * dz)
    return total / (len(spec.boundaries) * clip.skeleton.joint_count)


def brute_spatial(clip, spec):
    root = clip.skeleton.root_index
    total = 0.0
    for t, kp in spec.targets:
        dx = clip.frames[t][root][0] - kp.x_m
        dy = clip.frames[t][root][1] - kp.y_m
        total += math.sqrt(dx * dx + dy * dy)
    return total / len(spec.targets)


def test_identical_boundary_frames_give_zero():
    frames = np.zeros((4, 2, 3))
    clip = make_clip(frames, joints=2, boundaries=(2,))
    assert transition_distance(clip, TransitionSpec.from_clip(clip)) == 0.0


def test_transition_hand_example():
    # 2 joints, one boundary; joint displacements (0,1,0) and (0,0,1)
    frames = np.zeros((2, 2, 3))
    frames[1, 0, 1] = 1.0
    frames[1, 1, 2] = 1.0
    clip = make_clip(frames, joints=2)
    spec = TransitionSpec(boundaries=(((0, 1)),))
    assert transition_distance(clip, spec) == pytest.approx(1.0, abs=1e-15)


def test_transition_errors():
    clip = make_clip(np.zeros((4, 1, 3)))
    with pytest.raises(ValidationError):
        transition_distance(clip, TransitionSpec(boundaries=()))
    with pytest.raises(ValidationError):
        transition_distance(clip, TransitionSpec(boundaries=((3, 4),)))
    with pytest.raises(ValidationError):
        TransitionSpec(boundaries=((0, 2),))  # not adjacent


def test_spatial_zero_when_on_target():
    frames = np.zeros((3, 1, 3))
    clip = make_clip(frames)
    spec = SpatialSpec(targets=((2, Keypoint(0.0, 0.0, "o")),))
    assert spatial_distance(clip, spec) == 0.0


def test_spatial_hand_example():
    frames = np.zeros((2, 1, 3))
    frames[1, 0, 0] = 3.0
    frames[1, 0, 1] = 4.0
    clip = make_clip(frames)
    target = Keypoint(0.0, 0.0, "origin")
    spec = SpatialSpec(targets=((0, target), (1, target)))
    assert spatial_distance(clip, spec) == pytest.approx(2.5, abs=1e-15)


def test_spatial_ignores_z():
    rng = np.random.default_rng(0)
    frames = rng.normal(size=(5, 3, 3))
    clip = make_clip(frames, joints=3)
    spec = SpatialSpec(targets=((1, Keypoint(0.3, -0.2, "o")), (4, Keypoint(1.0, 1.0, "o"))))
    base = spatial_distance(clip, spec)
    bumped = frames.copy()
    bumped[:, :, 2] += rng.normal(size=(5, 3)) * 100
    assert spatial_distance(make_clip(bumped, joints=3), spec) == base


def test_spatial_errors():
    clip = make_clip(np.zeros((2, 1, 3)))
    with pytest.raises(ValidationError):
        spatial_distance(clip, SpatialSpec(targets=()))
    with pytest.raises(ValidationError):
        spatial_distance(clip, SpatialSpec(targets=((5, Keypoint(0, 0, "o")),)))


def test_oracle_equivalence_small_instances():
    rng = np.random.default_rng(42)
    for _ in range(60):
        joints = int(rng.integers(1, 9))
        n_bound = int(rng.integers(1, 7))
        n_frames = int(rng.integers(2 * n_bound + 1, 2 * n_bound + 20))
        clip = random_clip(rng, joints=joints, n_frames=n_frames)
        starts = rng.choice(np.arange(n_frames - 1), size=n_bound, replace=False)
        spec = TransitionSpec(boundaries=tuple((int(i), int(i) + 1) for i in sorted(starts)))
        assert transition_distance(clip, spec) == pytest.approx(
            brute_transition(clip, spec), abs=1e-12
        )
        targets = tuple(
            (int(t), Keypoint(float(rng.normal()), float(rng.normal()), "o"))
            for t in rng.choice(n_frames, size=3, replace=False)
        )
        sspec = SpatialSpec(targets=targets)
        assert spatial_distance(clip, sspec) == pytest.approx(
            brute_spatial(clip, sspec), abs=1e-12
        )


@settings(max_examples=30, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    dx=st.floats(-5, 5),
    dy=st.floats(-5, 5),
    scale=st.floats(0.1, 10),
)
def test_translation_invariance_and_scaling(seed, dx, dy, scale):
    rng = np.random.default_rng(seed)
    clip = random_clip(rng, joints=3, n_frames=8)
    spec = TransitionSpec(boundaries=((3, 4),))
    kp = Keypoint(0.5, -0.5, "o")
    sspec = SpatialSpec(targets=((6, kp),))

    t_base = transition_distance(clip, spec)
    s_base = spatial_distance(clip, sspec)

    shifted = make_clip(clip.frames + np.array([dx, dy, 0.0]), joints=3)
    shifted_spec = SpatialSpec(targets=((6, Keypoint(kp.x_m + dx, kp.y_m + dy, "o")),))
    assert transition_distance(shifted, spec) == pytest.approx(t_base, abs=1e-9)
    assert spatial_distance(shifted, shifted_spec) == pytest.approx(s_base, abs=1e-9)

    scaled = make_clip(clip.frames * scale, joints=3)
    scaled_spec = SpatialSpec(targets=((6, Keypoint(kp.x_m * scale, kp.y_m * scale, "o")),))
    assert transition_distance(scaled, spec) == pytest.approx(scale * t_base, rel=1e-9)
    assert spatial_distance(scaled, scaled_spec) == pytest.approx(scale * s_base, rel=1e-9)


def test_report_identical_inputs_ratio_one():
    rng = np.random.default_rng(1)
    clip = random_clip(rng, joints=2, n_frames=10)
    clip = clip.replace(boundaries=(5,))
    rep = report(clip, clip)
    assert rep.ratio == 1.0
    assert rep.naive.transition_m == rep.smoothed.transition_m


def test_report_on_constructed_jump_suite():
    from motionloom.benchmark import make_pair

    rng = np.random.default_rng(2)
    pair = make_pair(rng)
    naive = concat([pair.first, pair.second])
    smoothed = stitch([pair.first, pair.second], BlendConfig(15))
    rep = report(naive, smoothed)
    assert rep.smoothed.transition_m < rep.naive.transition_m
    assert rep.ratio > 3


def test_report_mismatched_boundaries_rejected():
    rng = np.random.default_rng(3)
    a = random_clip(rng, joints=1, n_frames=10).replace(boundaries=(5,))
    b = random_clip(rng, joints=1, n_frames=10).replace(boundaries=(4,))
    with pytest.raises(ValidationError):
        report(a, b)


def test_report_roundtrip(tmp_path):
    rng = np.random.default_rng(4)
    a = random_clip(rng, joints=2, n_frames=20).replace(boundaries=(10,))
    b = make_clip(a.frames + 0.01, joints=2, boundaries=(10,))
    spec = SpatialSpec(targets=((19, Keypoint(0.0, 0.0, "o")),))
    rep = report(a, b, spatial=spec)
    path = tmp_path / "report.json"
    save_report(rep, path)
    loaded = load_report(path)
    assert loaded == rep


def test_report_infinite_ratio_roundtrips():
    frames = np.zeros((4, 1, 3))
    frames[2:] += 1.0
    before = make_clip(frames, boundaries=(2,))
    after = make_clip(np.zeros((4, 1, 3)), boundaries=(2,))
    rep = report(before, after)
    assert math.isinf(rep.ratio)
    assert MetricsReport.loads(rep.dumps()) == rep


def test_report_without_boundaries_has_no_transition():
    clip = make_clip(np.zeros((4, 1, 3)))
    rep = report(clip, clip)
    assert rep.naive.transition_m is None
    assert rep.ratio is None
    assert MetricsReport.loads(rep.dumps()) == rep
