"""Reverse-process steps and the sampling loop.

Denoisers predict the clean sequence (x0-prediction); the noise estimate
each step needs is implied:

    eps_hat = (M_t - sqrt(alpha_bar_t) x0_pred) / sqrt(1 - alpha_bar_t)

The sampling loop is a pure function of (seed, config, denoiser); the
denoiser is invoked sequentially, twice per step (conditional and
unconditional passes for guidance).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..motion import DEFAULT_FPS, FRAME_DIM, MotionClip, NormStats, denormalize_array
from .ops import cfg_combine
from .schedule import NoiseSchedule

SCHEDULERS = ("ddim", "ddpm", "dpm-solver")  # dpm-solver is reserved, not implemented


@dataclass(frozen=True)
class SamplerConfig:
    scheduler: str = "ddim"
    num_steps: int = 10
    cfg_scale: float = 2.5
    eta: float = 0.0
    seed: int | None = 0
    p_uncond: float = 0.1  # training-side condition dropout rate

    def __post_init__(self):
        if self.scheduler not in SCHEDULERS:
            raise ValueError(f"scheduler must be one of {SCHEDULERS}, got {self.scheduler!r}")
        if self.num_steps < 1:
            raise ValueError("num_steps must be >= 1")
        if self.cfg_scale < 0:
            raise ValueError("cfg_scale must be >= 0")
        if self.eta < 0:
            raise ValueError("eta must be >= 0")
        if not 0.0 <= self.p_uncond <= 1.0:
            raise ValueError("p_uncond must be in [0, 1]")


def timestep_grid(num_timesteps: int, num_steps: int) -> np.ndarray:
    """Descending timestep grid [T, ..., 0], num_steps+1 entries evenly
    spaced in t (duplicates from rounding collapse)."""
    if not 1 <= num_steps <= num_timesteps:
        raise ValueError(f"num_steps must be in [1, {num_timesteps}]")
    grid = np.round(np.linspace(num_timesteps, 0, num_steps + 1)).astype(int)
    return np.unique(grid)[::-1].copy()


def ddim_step(m_t, t: int, t_prev: int, x0_pred, eta: float, sched: NoiseSchedule, noise=None):
    """One DDIM update from timestep t to t_prev (t > t_prev >= 0).

    sigma = eta * sqrt((1-ab_prev)/(1-ab_t)) * sqrt(1 - ab_t/ab_prev);
    M_prev = sqrt(ab_prev) x0 + sqrt(1 - ab_prev - sigma^2) eps_hat
             + sigma * noise.
    eta = 0 is fully deterministic; t_prev = 0 returns x0_pred exactly.
    """
    if not t > t_prev >= 0:
        raise ValueError(f"need t > t_prev >= 0, got t={t}, t_prev={t_prev}")
    m_t = np.asarray(m_t, dtype=np.float64)
    x0_pred = np.asarray(x0_pred, dtype=np.float64)
    if m_t.shape != x0_pred.shape:
        raise ValueError(f"shape mismatch: {m_t.shape} vs {x0_pred.shape}")
    ab_t = sched.alpha_bar(t)
    ab_p = sched.alpha_bar(t_prev)
    eps_hat = (m_t - np.sqrt(ab_t) * x0_pred) / np.sqrt(1.0 - ab_t)
    sigma = eta * np.sqrt((1.0 - ab_p) / (1.0 - ab_t)) * np.sqrt(1.0 - ab_t / ab_p)
    # 1 - ab_p - sigma^2 >= 0 analytically for eta <= 1; clamp for rounding
    dir_coef = np.sqrt(max(1.0 - ab_p - sigma * sigma, 0.0))
    out = np.sqrt(ab_p) * x0_pred + dir_coef * eps_hat
    if sigma > 0.0:
        if noise is None:
            raise ValueError("stochastic step (sigma > 0) requires a noise array")
        noise = np.asarray(noise, dtype=np.float64)
        if noise.shape != m_t.shape:
            raise ValueError("noise shape mismatch")
        out = out + sigma * noise
    return out


def ddpm_step(m_t, t: int, x0_pred, sched: NoiseSchedule, noise=None):
    """One ancestral posterior update from t to t-1.

    mu = (sqrt(ab_{t-1}) beta_t / (1-ab_t)) x0
       + (sqrt(alpha_t) (1-ab_{t-1}) / (1-ab_t)) M_t,
    variance beta_t (1-ab_{t-1}) / (1-ab_t).  The t = 1 step is the
    deterministic posterior mean (its variance is zero).
    """
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    m_t = np.asarray(m_t, dtype=np.float64)
    x0_pred = np.asarray(x0_pred, dtype=np.float64)
    if m_t.shape != x0_pred.shape:
        raise ValueError(f"shape mismatch: {m_t.shape} vs {x0_pred.shape}")
    ab_t = sched.alpha_bar(t)
    ab_p = sched.alpha_bar(t - 1)
    beta_t = sched.beta(t)
    alpha_t = sched.alpha(t)
    mean = (np.sqrt(ab_p) * beta_t / (1.0 - ab_t)) * x0_pred \
        + (np.sqrt(alpha_t) * (1.0 - ab_p) / (1.0 - ab_t)) * m_t
    if t == 1:
        return mean
    sigma = np.sqrt(beta_t * (1.0 - ab_p) / (1.0 - ab_t))
    if noise is None:
        raise ValueError("stochastic step requires a noise array")
    noise = np.asarray(noise, dtype=np.float64)
    if noise.shape != m_t.shape:
        raise ValueError("noise shape mismatch")
    return mean + sigma * noise


@dataclass(frozen=True)
class SampleResult:
    clip: MotionClip
    duration_s: float
    timesteps: np.ndarray


def sample(denoiser, condition, num_frames: int, config: SamplerConfig | None = None,
           sched: NoiseSchedule | None = None, stats: NormStats | None = None,
           fps: float = DEFAULT_FPS) -> SampleResult:
    """Draw one motion sequence of num_frames frames.

    Starts from seeded standard Gaussian noise, walks the evenly spaced
    timestep grid, queries the denoiser twice per step (condition and
    None) and blends with classifier-free guidance before each scheduler
    step.  scheduler 'ddpm' takes ancestral (eta = 1) steps on the same
    grid, which on the consecutive grid num_steps = T is the classic
    posterior chain.  The final sequence is denormalized through `stats`
    when given.
    """
    if config is None:
        config = SamplerConfig()
    if sched is None:
        sched = NoiseSchedule.linear()
    if config.scheduler == "dpm-solver":
        raise NotImplementedError("the dpm-solver tag is reserved; only ddim and ddpm are implemented")
    if num_frames < 1:
        raise ValueError("num_frames must be >= 1")

    start = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    x = rng.standard_normal((num_frames, FRAME_DIM))
    grid = timestep_grid(sched.num_timesteps, config.num_steps)
    eta = 1.0 if config.scheduler == "ddpm" else config.eta
    for t, t_prev in zip(grid[:-1], grid[1:]):
        pred_cond = denoiser(x, int(t), condition)
        pred_uncond = denoiser(x, int(t), None)
        x0_hat = cfg_combine(pred_cond, pred_uncond, config.cfg_scale)
        noise = rng.standard_normal(x.shape) if (eta > 0.0 and t_prev > 0) else None
        x = ddim_step(x, int(t), int(t_prev), x0_hat, eta, sched, noise)
    frames = denormalize_array(x, stats) if stats is not None else x
    prompt = condition if isinstance(condition, str) else None
    clip = MotionClip(frames=frames, fps=fps, prompt=prompt)
    return SampleResult(clip=clip, duration_s=time.perf_counter() - start, timesteps=grid)
