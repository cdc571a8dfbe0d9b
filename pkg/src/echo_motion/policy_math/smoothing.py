"""On-robot action smoothing: a first-order exponential moving average
applied to joint targets before they reach the PD controller."""

from __future__ import annotations

import numpy as np


def ema_action_filter(prev_action, new_action, beta: float):
    """beta * prev + (1 - beta) * new; prev_action None passes new
    through (first control tick)."""
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must be in [0, 1)")
    new_action = np.asarray(new_action, dtype=np.float64)
    if prev_action is None:
        return new_action.copy()
    prev_action = np.asarray(prev_action, dtype=np.float64)
    if prev_action.shape != new_action.shape:
        raise ValueError("action shape mismatch")
    return beta * prev_action + (1.0 - beta) * new_action


class EmaActionFilter:
    """Stateful wrapper owning the previous-action memory."""

    def __init__(self, beta: float = 0.8):
        if not 0.0 <= beta < 1.0:
            raise ValueError("beta must be in [0, 1)")
        self.beta = beta
        self._prev = None

    def filter(self, action):
        out = ema_action_filter(self._prev, action, self.beta)
        self._prev = out
        return out

    def reset(self):
        self._prev = None
