"""Training-side diffusion operations: masked loss, guidance, condition
dropout, and EMA weight shadowing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def masked_l2_loss(pred, target, mask) -> float:
    """Mean squared error over valid frames only.

    mask is a per-frame boolean vector; the sum of squared differences on
    valid frames is divided by (valid_frames x feature_dim).
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {target.shape}")
    mask = np.asarray(mask, dtype=bool).reshape(-1)
    if mask.shape[0] != pred.shape[0]:
        raise ValueError("mask length must equal the number of frames")
    valid = int(mask.sum())
    if valid == 0:
        raise ValueError("mask has no valid frames")
    diff = pred[mask] - target[mask]
    return float(np.sum(diff * diff) / (valid * pred.shape[1]))


def cfg_combine(cond, uncond, scale: float):
    """uncond + scale * (cond - uncond).

    scale 1 returns cond and scale 0 returns uncond exactly (bit-for-bit),
    not just up to rounding.
    """
    cond = np.asarray(cond, dtype=np.float64)
    uncond = np.asarray(uncond, dtype=np.float64)
    if cond.shape != uncond.shape:
        raise ValueError(f"shape mismatch: {cond.shape} vs {uncond.shape}")
    if scale < 0:
        raise ValueError("guidance scale must be >= 0")
    if scale == 1.0:
        return cond.copy()
    if scale == 0.0:
        return uncond.copy()
    return uncond + scale * (cond - uncond)


def cond_dropout(condition, p_uncond: float, rng):
    """Replace the condition tag with None with probability p_uncond.

    rng is a numpy Generator or a seed.
    """
    if not 0.0 <= p_uncond <= 1.0:
        raise ValueError("p_uncond must be in [0, 1]")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    if rng.random() < p_uncond:
        return None
    return condition


@dataclass(frozen=True)
class EmaWeights:
    """Shadow copy of a parameter vector under exponential decay.

    decay 0 is allowed and makes the shadow track the current weights
    exactly.
    """

    decay: float
    shadow: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.decay < 1.0:
            raise ValueError("decay must be in [0, 1)")
        shadow = np.asarray(self.shadow, dtype=np.float64)
        if not np.all(np.isfinite(shadow)):
            raise ValueError("non-finite shadow weights")
        object.__setattr__(self, "shadow", shadow)


def ema_init(current, decay: float = 0.999) -> EmaWeights:
    return EmaWeights(decay=decay, shadow=np.array(current, dtype=np.float64, copy=True))


def ema_update(ema: EmaWeights, current) -> EmaWeights:
    current = np.asarray(current, dtype=np.float64)
    if current.shape != ema.shadow.shape:
        raise ValueError(f"shape mismatch: {current.shape} vs {ema.shadow.shape}")
    return EmaWeights(decay=ema.decay, shadow=ema.decay * ema.shadow + (1.0 - ema.decay) * current)
