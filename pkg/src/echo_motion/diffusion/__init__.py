from .schedule import NoiseSchedule, forward_noise
from .ops import EmaWeights, cfg_combine, cond_dropout, ema_init, ema_update, masked_l2_loss
from .samplers import SampleResult, SamplerConfig, ddim_step, ddpm_step, sample, timestep_grid
from .oracle import canned_denoiser, gaussian_oracle_denoiser

__all__ = [
    "NoiseSchedule", "forward_noise",
    "EmaWeights", "cfg_combine", "cond_dropout", "ema_init", "ema_update", "masked_l2_loss",
    "SampleResult", "SamplerConfig", "ddim_step", "ddpm_step", "sample", "timestep_grid",
    "canned_denoiser", "gaussian_oracle_denoiser",
]
