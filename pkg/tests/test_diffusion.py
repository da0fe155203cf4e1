import numpy as np
import pytest

from motionloom.core import ValidationError
from motionloom.diffusion import (
    ConditionAssignment,
    Denoiser,
    MotionDataset,
    NoiseSchedule,
    QualityCapWarning,
    TextEmbedder,
    TrainConfig,
    clip_to_features,
    features_to_frames,
    forward_noise,
    sample,
    sample_prefix_mode,
    train,
    two_class_dataset,
    walker_dataset,
)
from motionloom.diffusion.network import init_params, loss_and_grads


# -- schedule -----------------------------------------------------------------

def test_schedule_invariants():
    s = NoiseSchedule.linear()
    assert s.T == 100
    assert np.all(np.diff(s.betas) > 0)
    bars = np.array([s.alpha_bar(t) for t in range(1, s.T + 1)])
    assert np.all(np.diff(bars) < 0)
    assert s.alpha_bar(s.T) < 0.05
    assert s.alpha_bar(0) == 1.0


def test_schedule_rejects_bad_betas():
    with pytest.raises(ValidationError):
        NoiseSchedule(betas=np.array([0.2, 0.1]))  # decreasing
    with pytest.raises(ValidationError):
        NoiseSchedule(betas=np.array([0.0, 0.1]))  # zero start
    with pytest.raises(ValidationError):
        NoiseSchedule(betas=np.array([1e-5, 2e-5]))  # never reaches noise


def test_forward_noise_zero_eps_branch():
    s = NoiseSchedule.linear()
    x0 = np.ones((3, 2))
    t = 40
    out = forward_noise(x0, t, s, rng_seed=0, eps=np.zeros_like(x0))
    assert np.allclose(out, np.sqrt(s.alpha_bar(t)) * x0, atol=0)


def test_forward_noise_t1_close_to_x0():
    s = NoiseSchedule.linear(T=100, beta_start=1e-6, beta_end=0.2)
    x0 = np.full((4, 4), 2.0)
    out = forward_noise(x0, 1, s, rng_seed=1)
    ab1 = s.alpha_bar(1)
    bound = 6 * np.sqrt(1 - ab1) + (1 - np.sqrt(ab1)) * np.abs(x0).max()
    assert np.max(np.abs(out - x0)) <= bound


def test_forward_noise_variance_monte_carlo():
    s = NoiseSchedule.linear()
    x0 = np.zeros((10_000, 1))
    for t in (10, 50, 100):
        x_t = forward_noise(x0, t, s, rng_seed=t)
        var = float(np.var(x_t))
        assert var == pytest.approx(1 - s.alpha_bar(t), rel=0.05)


def test_forward_noise_step_range():
    s = NoiseSchedule.linear()
    with pytest.raises(ValidationError):
        forward_noise(np.zeros((1, 1)), 0, s, rng_seed=0)
    with pytest.raises(ValidationError):
        forward_noise(np.zeros((1, 1)), 101, s, rng_seed=0)


def test_forward_noise_deterministic_per_seed():
    s = NoiseSchedule.linear()
    x0 = np.ones((5, 3))
    a = forward_noise(x0, 30, s, rng_seed=9)
    b = forward_noise(x0, 30, s, rng_seed=9)
    c = forward_noise(x0, 30, s, rng_seed=10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


# -- embeddings / assignment -----------------------------------------------------

def test_embedder_deterministic_unit_distinct():
    emb = TextEmbedder(16)
    a1 = emb.embed("walk forward")
    a2 = emb.embed("walk forward")
    b = emb.embed("walk backward")
    assert np.array_equal(a1, a2)
    assert not np.array_equal(a1, b)
    assert np.linalg.norm(a1) == pytest.approx(1.0, abs=1e-12)
    assert np.all(emb.null_embedding == 0)


def test_assignment_breakpoints_paper_layout():
    a = ConditionAssignment.from_lengths([("a", 60), ("b", 60), ("c", 60)])
    assert a.total_frames == 180
    assert a.breakpoints == (60, 120)


def test_assignment_must_cover_contiguously():
    with pytest.raises(ValidationError):
        ConditionAssignment(segments=(("a", (0, 10)), ("b", (12, 20))))
    with pytest.raises(ValidationError):
        ConditionAssignment(segments=(("a", (5, 10)),))
    with pytest.raises(ValidationError):
        ConditionAssignment(segments=(("a", (0, 0)),))


def test_condition_map_matches_segments():
    emb = TextEmbedder(8)
    a = ConditionAssignment.from_lengths([("x", 3), ("y", 2)], embedding_dim=8)
    cm = a.condition_map(emb)
    assert cm.shape == (5, 8)
    assert np.array_equal(cm[0], emb.embed("x"))
    assert np.array_equal(cm[2], emb.embed("x"))
    assert np.array_equal(cm[3], emb.embed("y"))
    pm = a.prefix_map(emb)
    assert np.array_equal(pm[4], emb.embed("x"))


def test_quality_and_hard_caps():
    ok = ConditionAssignment.from_lengths([("a", 196)])
    assert not ok.exceeds_quality_cap
    soft = ConditionAssignment.from_lengths([("a", 200)])
    with pytest.warns(QualityCapWarning):
        soft.warn_if_over_cap()
    hard = ConditionAssignment.from_lengths([("a", 513)])
    with pytest.raises(ValidationError):
        hard.warn_if_over_cap()


# -- features --------------------------------------------------------------------

def test_feature_roundtrip():
    rng = np.random.default_rng(0)
    ds = walker_dataset(n=4, frames=12, seed=3)
    clip = ds.clips[0]
    feats = clip_to_features(clip)
    frames = features_to_frames(feats, clip.skeleton, start_root=clip.frames[0, 0])
    assert np.allclose(frames, clip.frames, atol=1e-9)


# -- training ----------------------------------------------------------------------

def test_zero_steps_returns_initialization(schedule):
    ds = two_class_dataset(n=10, frames=8, seed=1)
    cfg = TrainConfig(steps=0, seed=5)
    d1 = train(ds, schedule, cfg)
    d2 = train(ds, schedule, cfg)
    for (w1, b1), (w2, b2) in zip(d1.params, d2.params):
        assert np.array_equal(w1, w2)
        assert np.array_equal(b1, b2)
    assert d1.loss_history == ()
    assert d1.initial_loss == d1.final_loss


def test_training_halves_loss(two_class_denoiser):
    assert two_class_denoiser.final_loss < 0.5 * two_class_denoiser.initial_loss


def test_training_deterministic(schedule):
    ds = two_class_dataset(n=30, frames=10, seed=2)
    cfg = TrainConfig(steps=50, batch_size=8, seed=11)
    d1 = train(ds, schedule, cfg)
    d2 = train(ds, schedule, cfg)
    for (w1, _), (w2, _) in zip(d1.params, d2.params):
        assert np.array_equal(w1, w2)
    assert d1.loss_history == d2.loss_history


def test_gradients_match_finite_differences():
    rng = np.random.Generator(np.random.PCG64(42))
    params = init_params([7, 6, 4], rng)
    x = rng.standard_normal((5, 7))
    y = rng.standard_normal((5, 4))
    _, grads = loss_and_grads(params, x, y)
    h = 1e-6
    for li in range(len(params)):
        for which in (0, 1):
            arr = params[li][which]
            grad = grads[li][which]
            it = np.nditer(arr, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                orig = arr[idx]
                arr[idx] = orig + h
                lp, _ = loss_and_grads(params, x, y)
                arr[idx] = orig - h
                lm, _ = loss_and_grads(params, x, y)
                arr[idx] = orig
                numeric = (lp - lm) / (2 * h)
                denom = max(abs(numeric), abs(grad[idx]), 1e-8)
                assert abs(numeric - grad[idx]) / denom < 1e-4


# -- sampling -------------------------------------------------------------------------

def test_sample_shape_and_determinism(two_class_denoiser, schedule):
    a = ConditionAssignment.from_lengths([("move right", 25), ("move left", 15)])
    c1 = sample(a, two_class_denoiser, schedule, rng_seed=7)
    c2 = sample(a, two_class_denoiser, schedule, rng_seed=7)
    assert c1.frames.shape == (40, 1, 3)
    assert np.array_equal(c1.frames, c2.frames)
    assert c1.boundaries == (25,)


def test_sample_condition_input_locality(two_class_denoiser, schedule):
    a = ConditionAssignment.from_lengths([("move right", 10), ("move left", 20)])
    expected = a.condition_map(two_class_denoiser.embedder())
    seen = []
    sample(a, two_class_denoiser, schedule, rng_seed=0, hook=lambda t, c: seen.append((t, c.copy())))
    assert len(seen) == schedule.T
    assert [t for t, _ in seen] == list(range(schedule.T, 0, -1))
    for _, cond in seen:
        assert np.array_equal(cond, expected)


def test_sample_guidance_scale_zero_is_unconditional(two_class_denoiser, schedule):
    a = ConditionAssignment.from_lengths([("move right", 12)])
    b = ConditionAssignment.from_lengths([("a totally different text", 12)])
    ca = sample(a, two_class_denoiser, schedule, guidance_scale=0.0, rng_seed=3)
    cb = sample(b, two_class_denoiser, schedule, guidance_scale=0.0, rng_seed=3)
    assert np.array_equal(ca.frames, cb.frames)


def test_sample_condition_following(two_class_denoiser, schedule):
    hits = 0
    n = 30
    for seed in range(n):
        a = ConditionAssignment.from_lengths([("move right", 20), ("move left", 20)])
        clip = sample(a, two_class_denoiser, schedule, rng_seed=seed)
        x = clip.frames[:, 0, 0]
        hits += (np.mean(np.diff(x[:20])) > 0) and (np.mean(np.diff(x[20:])) < 0)
    assert hits >= 0.9 * n


def test_prefix_mode_single_segment_matches_sample(two_class_denoiser, schedule):
    a = ConditionAssignment.from_lengths([("move right", 16)])
    c1 = sample(a, two_class_denoiser, schedule, rng_seed=4)
    c2 = sample_prefix_mode(a, two_class_denoiser, schedule, rng_seed=4)
    assert np.array_equal(c1.frames, c2.frames)


def test_prefix_mode_ignores_later_segments(two_class_denoiser, schedule):
    followed = 0
    n = 30
    for seed in range(n):
        a = ConditionAssignment.from_lengths([("move right", 20), ("move left", 20)])
        clip = sample_prefix_mode(a, two_class_denoiser, schedule, rng_seed=seed)
        x = clip.frames[:, 0, 0]
        followed += np.mean(np.diff(x[20:])) < 0
    assert followed <= 0.6 * n


def test_sample_dim_mismatch_rejected(two_class_denoiser, schedule):
    bad = ConditionAssignment.from_lengths([("move right", 8)], embedding_dim=7)
    with pytest.raises(ValidationError):
        sample(bad, two_class_denoiser, schedule, rng_seed=0)


def test_checkpoint_roundtrip(tmp_path, two_class_denoiser, schedule):
    path = tmp_path / "ckpt.json"
    two_class_denoiser.save(path)
    loaded = Denoiser.load(path)
    for (w1, b1), (w2, b2) in zip(two_class_denoiser.params, loaded.params):
        assert np.array_equal(w1, w2)
        assert np.array_equal(b1, b2)
    a = ConditionAssignment.from_lengths([("move right", 10)])
    c1 = sample(a, two_class_denoiser, schedule, rng_seed=1)
    c2 = sample(a, loaded, schedule, rng_seed=1)
    assert np.array_equal(c1.frames, c2.frames)


def test_dataset_file_roundtrip(tmp_path):
    ds = two_class_dataset(n=6, frames=10, seed=9)
    path = tmp_path / "data.json"
    ds.save(path)
    loaded = MotionDataset.load(path)
    assert len(loaded.clips) == 6
    assert loaded.labels == ds.labels
    assert np.array_equal(loaded.clips[0].frames, ds.clips[0].frames)
