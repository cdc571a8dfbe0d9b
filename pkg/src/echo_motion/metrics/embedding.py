"""Distribution and retrieval metrics over precomputed embeddings.

Embeddings arrive from files; nothing here computes them.  The .emb
binary layout (little-endian): magic "EMB1", N u32, D u32, role u8
(1 motion, 2 text, 0 unspecified), then N x D f32 row-major.  CSV is
also accepted: plain comma-separated numeric rows, no header.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass

import numpy as np

EMB_MAGIC = b"EMB1"
_ROLE_TO_BYTE = {"unspecified": 0, "motion": 1, "text": 2}
_BYTE_TO_ROLE = {v: k for k, v in _ROLE_TO_BYTE.items()}


@dataclass(frozen=True)
class EmbeddingSet:
    vectors: np.ndarray            # (N, D)
    role: str = "unspecified"      # motion | text | unspecified
    ids: np.ndarray | None = None  # optional pairing ids, (N,)

    def __post_init__(self):
        vec = np.asarray(self.vectors, dtype=np.float64)
        if vec.ndim != 2 or vec.shape[0] < 1:
            raise ValueError(f"vectors must be (N, D) with N >= 1, got {vec.shape}")
        if not np.all(np.isfinite(vec)):
            raise ValueError("non-finite embeddings")
        if self.role not in _ROLE_TO_BYTE:
            raise ValueError(f"role must be one of {sorted(_ROLE_TO_BYTE)}")
        object.__setattr__(self, "vectors", vec)
        if self.ids is not None:
            ids = np.asarray(self.ids)
            if ids.shape != (vec.shape[0],):
                raise ValueError("ids must match the number of rows")
            object.__setattr__(self, "ids", ids)

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def save_embeddings(path, emb: EmbeddingSet) -> None:
    with open(path, "wb") as fh:
        fh.write(EMB_MAGIC)
        fh.write(struct.pack("<IIB", len(emb), emb.dim, _ROLE_TO_BYTE[emb.role]))
        fh.write(np.ascontiguousarray(emb.vectors, dtype="<f4").tobytes())


def load_embeddings(path) -> EmbeddingSet:
    path = str(path)
    if path.endswith(".csv") or path.endswith(".txt"):
        vec = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
        return EmbeddingSet(vectors=vec)
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 13 or data[:4] != EMB_MAGIC:
        raise ValueError("not an .emb file")
    n, d, role = struct.unpack_from("<IIB", data, 4)
    need = 13 + n * d * 4
    if len(data) < need:
        raise ValueError("truncated .emb file")
    vec = np.frombuffer(data, dtype="<f4", count=n * d, offset=13).reshape(n, d)
    return EmbeddingSet(vectors=vec.astype(np.float64), role=_BYTE_TO_ROLE.get(role, "unspecified"))


def _sym_sqrt(mat: np.ndarray, clip: float = 1e-10) -> np.ndarray:
    # symmetric PSD square root via eigendecomposition; tiny negatives clipped
    w, u = np.linalg.eigh(mat)
    w = np.where(w < clip, 0.0, w)
    return (u * np.sqrt(w)) @ u.T


def fid_from_stats(mean_a, cov_a, mean_b, cov_b) -> float:
    """Frechet distance between two Gaussians given their moments.

    ||mu_a - mu_b||^2 + Tr(Ca + Cb - 2 (Ca Cb)^{1/2}), with the matrix
    square root computed symmetrically as sqrt(Ca)^T Cb sqrt(Ca) to stay
    in real arithmetic.  Eigenvalues below 1e-10 are clipped to zero.
    """
    mean_a = np.asarray(mean_a, dtype=np.float64)
    mean_b = np.asarray(mean_b, dtype=np.float64)
    cov_a = np.atleast_2d(np.asarray(cov_a, dtype=np.float64))
    cov_b = np.atleast_2d(np.asarray(cov_b, dtype=np.float64))
    diff = mean_a - mean_b
    sqrt_a = _sym_sqrt(cov_a)
    inner = sqrt_a @ cov_b @ sqrt_a
    w, _ = np.linalg.eigh(inner)
    w = np.where(w < 1e-10, 0.0, w)
    tr_cross = 2.0 * float(np.sum(np.sqrt(w)))
    value = float(diff @ diff + np.trace(cov_a) + np.trace(cov_b) - tr_cross)
    return max(value, 0.0)


def fid(a: EmbeddingSet, b: EmbeddingSet) -> float:
    for s in (a, b):
        if len(s) < 2:
            raise ValueError("need at least 2 embeddings per set")
        if len(s) < s.dim:
            warnings.warn(f"fitting a {s.dim}-dim Gaussian to only {len(s)} samples", stacklevel=2)
    mu_a = a.vectors.mean(axis=0)
    mu_b = b.vectors.mean(axis=0)
    cov_a = np.cov(a.vectors, rowvar=False)
    cov_b = np.cov(b.vectors, rowvar=False)
    return fid_from_stats(mu_a, cov_a, mu_b, cov_b)


@dataclass(frozen=True)
class RPrecisionResult:
    top1: float
    top2: float
    top3: float


def r_precision(motion_emb: EmbeddingSet, text_emb: EmbeddingSet,
                pool_size: int = 32, seed: int = 0) -> RPrecisionResult:
    """Retrieval accuracy of each motion against its paired text plus
    pool_size-1 seeded distractors, ranked by Euclidean distance.

    The true pair wins ties: rank = 1 + number of strictly closer
    distractors.
    """
    m, t = motion_emb.vectors, text_emb.vectors
    if m.shape != t.shape:
        raise ValueError("paired sets must have identical shapes")
    n = m.shape[0]
    if pool_size < 1:
        raise ValueError("pool_size must be >= 1")
    if n < pool_size:
        raise ValueError(f"need at least pool_size={pool_size} pairs, got {n}")
    rng = np.random.default_rng(seed)
    hits = np.zeros(3, dtype=np.int64)
    for i in range(n):
        others = rng.choice(n - 1, size=pool_size - 1, replace=False)
        others[others >= i] += 1  # skip the true index
        # one batched norm so the true distance and the distractor
        # distances share a float path; split paths can differ by an ulp
        # and silently break the tie rule
        pool = np.concatenate(([i], others))
        d = np.linalg.norm(t[pool] - m[i], axis=1)
        rank = 1 + int(np.sum(d[1:] < d[0]))
        for k in range(3):
            if rank <= k + 1:
                hits[k] += 1
    return RPrecisionResult(*(hits / n))


def diversity(emb: EmbeddingSet, num_pairs: int = 300, seed: int = 0) -> float:
    """Mean Euclidean distance over seeded random distinct-index pairs."""
    n = len(emb)
    if n < 2:
        raise ValueError("need at least 2 embeddings")
    rng = np.random.default_rng(seed)
    first = rng.integers(0, n, size=num_pairs)
    second = rng.integers(0, n - 1, size=num_pairs)
    second[second >= first] += 1
    return float(np.linalg.norm(emb.vectors[first] - emb.vectors[second], axis=1).mean())


def mm_dist(motion_emb: EmbeddingSet, text_emb: EmbeddingSet) -> float:
    """Mean Euclidean distance between paired rows."""
    m, t = motion_emb.vectors, text_emb.vectors
    if m.shape != t.shape:
        raise ValueError("paired sets must have identical shapes")
    return float(np.linalg.norm(m - t, axis=1).mean())
