from .safety import SafetyLimits, MssResult, default_safety_limits, motion_safety_score
from .trajectory import RTCConfig, RtcResult, arclength_resample, path_consistency, root_trajectory_consistency
from .embedding import (
    EmbeddingSet,
    RPrecisionResult,
    diversity,
    fid,
    fid_from_stats,
    load_embeddings,
    mm_dist,
    r_precision,
    save_embeddings,
)
from .position_error import mpjpe

__all__ = [
    "SafetyLimits", "MssResult", "default_safety_limits", "motion_safety_score",
    "RTCConfig", "RtcResult", "arclength_resample", "path_consistency", "root_trajectory_consistency",
    "EmbeddingSet", "RPrecisionResult", "diversity", "fid", "fid_from_stats",
    "load_embeddings", "mm_dist", "r_precision", "save_embeddings",
    "mpjpe",
]
