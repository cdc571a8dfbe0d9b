"""Morphological symmetry loss for mirrored gaits.

A mirror map is an index permutation plus a per-index sign vector and
must be an involution (applying it twice is the identity).  The loss
compares the policy's output on an observation against the mirrored
output on the mirrored observation:

    c_mu    ||mu(o)    - T_act(mu(T_obs(o)))||^2
  + c_sigma ||sigma(o) - T_act(sigma(T_obs(o)))||^2

The sigma branch permutes indices only: standard deviations are
nonnegative magnitudes, so mirroring must not flip their sign.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..joints import NUM_JOINTS


@dataclass(frozen=True)
class MirrorMap:
    perm: np.ndarray   # (n,) int, target index for each slot
    signs: np.ndarray  # (n,) +1/-1

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        signs = np.asarray(self.signs, dtype=np.float64)
        n = perm.shape[0]
        if perm.ndim != 1 or signs.shape != (n,):
            raise ValueError("perm and signs must be 1-D with equal length")
        if sorted(perm.tolist()) != list(range(n)):
            raise ValueError("perm must be a permutation")
        if not np.all(np.abs(signs) == 1.0):
            raise ValueError("signs must be +1 or -1")
        if not np.array_equal(perm[perm], np.arange(n)):
            raise ValueError("mirror map must be an involution (perm o perm = identity)")
        if not np.all(signs * signs[perm] == 1.0):
            raise ValueError("mirror map must be an involution (signs inconsistent)")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)

    def __len__(self) -> int:
        return self.perm.shape[0]

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != len(self):
            raise ValueError(f"expected last dim {len(self)}, got {x.shape}")
        return self.signs * x[..., self.perm]

    def apply_unsigned(self, x) -> np.ndarray:
        """Permute without sign flips (for nonnegative magnitudes)."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != len(self):
            raise ValueError(f"expected last dim {len(self)}, got {x.shape}")
        return x[..., self.perm]


@dataclass(frozen=True)
class SymmetrySpec:
    obs_map: MirrorMap
    act_map: MirrorMap
    c_mu: float = 1.0
    c_sigma: float = 1.0

    def __post_init__(self):
        if self.c_mu < 0 or self.c_sigma < 0:
            raise ValueError("coefficients must be >= 0")


def symmetry_loss(policy, obs, spec: SymmetrySpec) -> float:
    """policy: callable obs -> (mu, sigma), both action-sized arrays."""
    obs = np.asarray(obs, dtype=np.float64)
    mu, sigma = policy(obs)
    mu_m, sigma_m = policy(spec.obs_map.apply(obs))
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    d_mu = mu - spec.act_map.apply(mu_m)
    d_sigma = sigma - spec.act_map.apply_unsigned(sigma_m)
    return float(spec.c_mu * np.sum(d_mu * d_mu) + spec.c_sigma * np.sum(d_sigma * d_sigma))


# Left/right limb swap for the canonical 29-DoF ordering: roll and yaw
# joints flip sign across the sagittal plane, pitch joints do not; the
# waist yaw/roll mirror onto themselves with a sign flip.
_G1_MIRROR_ROWS = [
    (0, 6, 1), (1, 7, -1), (2, 8, -1), (3, 9, 1), (4, 10, 1), (5, 11, -1),
    (6, 0, 1), (7, 1, -1), (8, 2, -1), (9, 3, 1), (10, 4, 1), (11, 5, -1),
    (12, 12, -1), (13, 13, -1), (14, 14, 1),
    (15, 22, 1), (16, 23, -1), (17, 24, -1), (18, 25, 1), (19, 26, -1), (20, 27, 1), (21, 28, -1),
    (22, 15, 1), (23, 16, -1), (24, 17, -1), (25, 18, 1), (26, 19, -1), (27, 20, 1), (28, 21, -1),
]


def default_action_mirror() -> MirrorMap:
    perm = np.empty(NUM_JOINTS, dtype=np.int64)
    signs = np.empty(NUM_JOINTS, dtype=np.float64)
    for idx, mirrored, sign in _G1_MIRROR_ROWS:
        perm[idx] = mirrored
        signs[idx] = sign
    return MirrorMap(perm=perm, signs=signs)


def load_mirror_map(path) -> MirrorMap:
    """Text table, one row per index: `index, mirrored_index, sign`."""
    rows = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p for p in line.replace(",", " ").split() if p]
            if len(parts) != 3:
                raise ValueError(f"bad mirror-map line: {raw!r}")
            idx, mirrored, sign = int(parts[0]), int(parts[1]), float(parts[2])
            if idx in rows:
                raise ValueError(f"duplicate index {idx}")
            rows[idx] = (mirrored, sign)
    n = len(rows)
    if sorted(rows) != list(range(n)):
        raise ValueError("mirror map rows must cover 0..n-1")
    perm = np.array([rows[i][0] for i in range(n)], dtype=np.int64)
    signs = np.array([rows[i][1] for i in range(n)], dtype=np.float64)
    return MirrorMap(perm=perm, signs=signs)


def save_mirror_map(path, mm: MirrorMap) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# index, mirrored_index, sign\n")
        for i in range(len(mm)):
            fh.write(f"{i}, {int(mm.perm[i])}, {int(mm.signs[i])}\n")
