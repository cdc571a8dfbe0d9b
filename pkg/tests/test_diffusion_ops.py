import numpy as np
import pytest

from echo_motion.diffusion import (
    EmaWeights,
    cfg_combine,
    cond_dropout,
    ema_init,
    ema_update,
    masked_l2_loss,
)


def test_masked_loss_full_mask_is_mse(rng):
    pred = rng.normal(size=(6, 38))
    target = rng.normal(size=(6, 38))
    mask = np.ones(6, dtype=bool)
    expect = float(np.mean((pred - target) ** 2))
    assert masked_l2_loss(pred, target, mask) == pytest.approx(expect, rel=1e-12)


def test_masked_loss_ignores_masked_frames(rng):
    pred = rng.normal(size=(4, 38))
    target = np.array(pred)
    target[2] += 100.0  # this frame is masked out
    mask = np.array([True, True, False, True])
    assert masked_l2_loss(pred, target, mask) == 0.0


def test_masked_loss_normalizer_counts_valid_only():
    pred = np.zeros((4, 2))
    target = np.zeros((4, 2))
    target[0, 0] = 2.0
    mask = np.array([True, True, False, False])
    # sum sq = 4 over 2 valid frames x 2 dims
    assert masked_l2_loss(pred, target, mask) == pytest.approx(1.0, abs=1e-15)


def test_masked_loss_all_invalid():
    with pytest.raises(ValueError):
        masked_l2_loss(np.zeros((3, 2)), np.zeros((3, 2)), np.zeros(3, dtype=bool))


def test_cfg_identities(rng):
    cond = rng.normal(size=(5, 38))
    uncond = rng.normal(size=(5, 38))
    assert np.array_equal(cfg_combine(cond, uncond, 1.0), cond)
    assert np.array_equal(cfg_combine(cond, uncond, 0.0), uncond)
    same = cfg_combine(cond, cond, 2.5)
    assert np.max(np.abs(same - cond)) < 1e-12


def test_cfg_extrapolation(rng):
    cond = rng.normal(size=(3, 4))
    uncond = rng.normal(size=(3, 4))
    out = cfg_combine(cond, uncond, 2.5)
    assert np.allclose(out, uncond + 2.5 * (cond - uncond), atol=1e-15)


def test_cfg_rejects_negative_scale(rng):
    x = rng.normal(size=(2, 2))
    with pytest.raises(ValueError):
        cfg_combine(x, x, -0.5)


def test_cond_dropout_extremes(rng):
    cond = rng.normal(size=(8,))
    assert cond_dropout(cond, 0.0, rng) is cond
    assert cond_dropout(cond, 1.0, rng) is None


def test_cond_dropout_rate(rng):
    cond = "a prompt"
    n = 20000
    dropped = sum(1 for _ in range(n) if cond_dropout(cond, 0.1, rng) is None)
    assert dropped / n == pytest.approx(0.1, abs=0.01)


def test_cond_dropout_seed_reproducible():
    cond = "a prompt"
    a = [cond_dropout(cond, 0.5, np.random.default_rng(s)) is None for s in range(20)]
    b = [cond_dropout(cond, 0.5, np.random.default_rng(s)) is None for s in range(20)]
    assert a == b


def test_cond_dropout_validation(rng):
    with pytest.raises(ValueError):
        cond_dropout("x", 1.5, rng)


def test_ema_init_copies(rng):
    w = rng.normal(size=(5, 3))
    ema = ema_init(w, decay=0.999)
    assert np.array_equal(ema.shadow, w)
    w[0, 0] = 99.0
    assert ema.shadow[0, 0] != 99.0


def test_ema_update_formula(rng):
    w0 = rng.normal(size=(4,))
    ema = ema_init(w0, decay=0.9)
    w1 = rng.normal(size=(4,))
    ema = ema_update(ema, w1)
    assert np.allclose(ema.shadow, 0.9 * w0 + 0.1 * w1, atol=1e-15)


def test_ema_zero_decay_tracks_current(rng):
    ema = ema_init(rng.normal(size=(3,)), decay=0.0)
    w = rng.normal(size=(3,))
    ema = ema_update(ema, w)
    assert np.array_equal(ema.shadow, w)


def test_ema_converges_to_constant():
    ema = ema_init(np.zeros(1), decay=0.9)
    target = np.ones(1)
    for _ in range(500):
        ema = ema_update(ema, target)
    # float64 fixed point sits a few ulps shy of the target
    assert abs(ema.shadow[0] - 1.0) < 1e-12


def test_ema_decay_validation():
    with pytest.raises(ValueError):
        EmaWeights(decay=1.0, shadow=np.zeros(2))
    with pytest.raises(ValueError):
        EmaWeights(decay=-0.1, shadow=np.zeros(2))
