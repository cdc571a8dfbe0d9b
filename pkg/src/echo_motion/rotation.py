"""6D rotation encoding and Gram-Schmidt decoding.

A rotation matrix R is encoded as its first two columns, flattened
column-major: (r11, r21, r31, r12, r22, r32).  Decoding orthonormalizes
the two triples and completes the third column with a cross product, so
the encoding is invariant to positive rescaling of either triple.
"""

from __future__ import annotations

import numpy as np

DEGENERACY_TOL = 1e-8


class DegenerateRotation(ValueError):
    """Raised when a 6D vector cannot be orthonormalized."""


def rot_matrix_to_6d(R) -> np.ndarray:
    """First two columns of R, column-major order.

    R must be orthonormal with det +1 (checked to 1e-6).
    """
    R = np.asarray(R, dtype=np.float64)
    if R.shape != (3, 3):
        raise ValueError(f"expected 3x3 matrix, got {R.shape}")
    if not np.all(np.isfinite(R)):
        raise ValueError("non-finite rotation matrix")
    if np.max(np.abs(R.T @ R - np.eye(3))) > 1e-6 or np.linalg.det(R) < 0:
        raise ValueError("input is not a rotation matrix (orthonormal, det +1)")
    return np.concatenate([R[:, 0], R[:, 1]])


def rot6d_to_matrix(v) -> np.ndarray:
    """Gram-Schmidt decode of a 6D rotation vector to a 3x3 matrix.

    b1 = normalize(v[0:3]); b2 = normalize(v[3:6] projected off b1);
    b3 = b1 x b2.  Raises DegenerateRotation when either normalization
    would divide by less than 1e-8.
    """
    v = np.asarray(v, dtype=np.float64).reshape(6)
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite 6D rotation input")
    a1, a2 = v[0:3], v[3:6]
    n1 = np.linalg.norm(a1)
    if n1 < DEGENERACY_TOL:
        raise DegenerateRotation(f"first triple has norm {n1:.3e}")
    b1 = a1 / n1
    r2 = a2 - np.dot(b1, a2) * b1
    n2 = np.linalg.norm(r2)
    if n2 < DEGENERACY_TOL:
        raise DegenerateRotation(f"second triple degenerate after projection, norm {n2:.3e}")
    b2 = r2 / n2
    b3 = np.cross(b1, b2)
    return np.stack([b1, b2, b3], axis=1)


def rot6d_to_matrix_batch(v) -> np.ndarray:
    """Vectorized decode of (N, 6) -> (N, 3, 3); same degeneracy rule."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != 6:
        raise ValueError(f"expected (N, 6), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite 6D rotation input")
    a1, a2 = v[:, 0:3], v[:, 3:6]
    n1 = np.linalg.norm(a1, axis=1)
    if np.any(n1 < DEGENERACY_TOL):
        bad = int(np.argmax(n1 < DEGENERACY_TOL))
        raise DegenerateRotation(f"first triple degenerate at row {bad}")
    b1 = a1 / n1[:, None]
    r2 = a2 - np.sum(b1 * a2, axis=1, keepdims=True) * b1
    n2 = np.linalg.norm(r2, axis=1)
    if np.any(n2 < DEGENERACY_TOL):
        bad = int(np.argmax(n2 < DEGENERACY_TOL))
        raise DegenerateRotation(f"second triple degenerate at row {bad}")
    b2 = r2 / n2[:, None]
    b3 = np.cross(b1, b2)
    return np.stack([b1, b2, b3], axis=2)


def rot_matrix_to_6d_batch(R) -> np.ndarray:
    R = np.asarray(R, dtype=np.float64)
    if R.ndim != 3 or R.shape[1:] != (3, 3):
        raise ValueError(f"expected (N, 3, 3), got {R.shape}")
    return np.concatenate([R[:, :, 0], R[:, :, 1]], axis=1)
