from .rewards import (
    DEFAULT_REGULARIZATION_WEIGHTS,
    DEFAULT_TRACKING_WEIGHTS,
    RewardConfig,
    default_tracking_config,
    feet_air_time_reward,
    impact_penalty,
    tracking_reward,
)
from .symmetry import MirrorMap, SymmetrySpec, default_action_mirror, load_mirror_map, save_mirror_map, symmetry_loss
from .evidential import NIGParams, evidential_loss, evidential_nll, evidential_reg
from .randomization import RandomizationSpec, default_randomization_spec, load_randomization_spec, sample_randomization, save_randomization_spec
from .smoothing import EmaActionFilter, ema_action_filter

__all__ = [
    "DEFAULT_REGULARIZATION_WEIGHTS", "DEFAULT_TRACKING_WEIGHTS", "RewardConfig", "default_tracking_config",
    "feet_air_time_reward", "impact_penalty", "tracking_reward",
    "MirrorMap", "SymmetrySpec", "default_action_mirror", "load_mirror_map", "save_mirror_map", "symmetry_loss",
    "NIGParams", "evidential_loss", "evidential_nll", "evidential_reg",
    "RandomizationSpec", "default_randomization_spec", "load_randomization_spec",
    "sample_randomization", "save_randomization_spec",
    "EmaActionFilter", "ema_action_filter",
]
