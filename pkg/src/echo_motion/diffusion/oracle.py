"""Reference denoisers for verifying the sampler stack.

No neural networks live in this package; these two constructions are the
only built-in denoisers.  The Gaussian oracle is the exact Bayes
x0-predictor when the clean data is N(mean, diag(var)), which makes
sampling statistics checkable against closed forms.
"""

from __future__ import annotations

import numpy as np

from .schedule import NoiseSchedule


def gaussian_oracle_denoiser(data_mean, data_var, sched: NoiseSchedule):
    """Exact posterior-mean denoiser for Gaussian data, applied per dim:

        E[M0 | M_t] = (sqrt(ab_t) var M_t + (1 - ab_t) mean)
                      / (ab_t var + (1 - ab_t))

    data_mean and data_var broadcast against the sequence; var must be
    positive.  The condition tag is ignored (the oracle is prompt-blind),
    which also makes guided sampling collapse to the unguided answer.
    """
    mean = np.asarray(data_mean, dtype=np.float64)
    var = np.asarray(data_var, dtype=np.float64)
    if np.any(var <= 0):
        raise ValueError("data variance must be positive")

    def denoise(m_t, t: int, condition=None):
        m_t = np.asarray(m_t, dtype=np.float64)
        ab = sched.alpha_bar(t)
        return (np.sqrt(ab) * var * m_t + (1.0 - ab) * mean) / (ab * var + (1.0 - ab))

    return denoise


def canned_denoiser(frames):
    """Denoiser that always predicts a fixed sequence, ignoring its
    inputs.  Useful for wiring tests and file-backed server load tests
    (load a clip, hand its frames here)."""
    canned = np.array(frames, dtype=np.float64, copy=True)

    def denoise(m_t, t: int, condition=None):
        m_t = np.asarray(m_t)
        if m_t.shape != canned.shape:
            raise ValueError(f"canned prediction is {canned.shape}, input is {m_t.shape}")
        return canned.copy()

    return denoise
