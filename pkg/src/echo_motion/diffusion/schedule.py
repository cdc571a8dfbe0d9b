"""Forward diffusion noise schedule.

alpha_bar is indexed with a leading 1.0 so alpha_bar(0) = 1 (the clean
boundary) and alpha_bar(t) = prod_{s<=t} (1 - beta_s) for t in [1, T].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NoiseSchedule:
    betas: np.ndarray  # (T,), beta_t for t = 1..T stored at index t-1

    def __post_init__(self):
        betas = np.asarray(self.betas, dtype=np.float64)
        if betas.ndim != 1 or betas.shape[0] < 1:
            raise ValueError("betas must be a non-empty 1-D array")
        if np.any(betas <= 0) or np.any(betas >= 1):
            raise ValueError("betas must lie strictly in (0, 1)")
        alpha_bars = np.concatenate([[1.0], np.cumprod(1.0 - betas)])
        if np.any(np.diff(alpha_bars) >= 0):
            raise ValueError("alpha_bar must be strictly decreasing")
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "_alpha_bars", alpha_bars)

    @classmethod
    def linear(cls, num_timesteps: int = 1000, beta_start: float = 1e-4,
               beta_end: float = 0.02) -> "NoiseSchedule":
        return cls(betas=np.linspace(beta_start, beta_end, num_timesteps))

    @property
    def num_timesteps(self) -> int:
        return self.betas.shape[0]

    def beta(self, t: int) -> float:
        if not 1 <= t <= self.num_timesteps:
            raise ValueError(f"t must be in [1, {self.num_timesteps}], got {t}")
        return float(self.betas[t - 1])

    def alpha(self, t: int) -> float:
        return 1.0 - self.beta(t)

    def alpha_bar(self, t: int) -> float:
        if not 0 <= t <= self.num_timesteps:
            raise ValueError(f"t must be in [0, {self.num_timesteps}], got {t}")
        return float(self._alpha_bars[t])


def forward_noise(m0, t: int, noise, sched: NoiseSchedule):
    """M_t = sqrt(alpha_bar_t) M_0 + sqrt(1 - alpha_bar_t) noise.

    t = 0 is the clean boundary and returns M_0 unchanged.
    """
    m0 = np.asarray(m0, dtype=np.float64)
    noise = np.asarray(noise, dtype=np.float64)
    if m0.shape != noise.shape:
        raise ValueError(f"shape mismatch: {m0.shape} vs {noise.shape}")
    ab = sched.alpha_bar(t)
    return np.sqrt(ab) * m0 + np.sqrt(1.0 - ab) * noise
