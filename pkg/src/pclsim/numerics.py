"""Small dense linear-algebra kernel: solves, symmetric spectra, PSD roots.

All matrices in the simulator are dense and small (d <= ~50), so LAPACK via
numpy/scipy is more than enough. The three entry points below add the
contracts the rest of the library relies on: explicit singularity detection,
exact symmetric-part semantics, and clamped PSD square roots.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg


class SingularMatrixError(ValueError):
    """Linear system has no reliable solution (pivot below tolerance)."""


class NotSymmetricError(ValueError):
    """Matrix is not symmetric within tolerance."""


def solve_linear(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Solve m @ x = v for square m.

    Raises SingularMatrixError when the smallest LU pivot magnitude falls
    below 1e-12 * max|m|. One step of iterative refinement keeps the
    residual below 1e-10 * (1 + ||v||) on well-posed systems.
    """
    m = np.asarray(m, dtype=float)
    v = np.asarray(v, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected square matrix, got shape {m.shape}")
    if v.shape != (m.shape[0],):
        raise ValueError(f"dimension mismatch: {m.shape} vs {v.shape}")
    norm_max = np.abs(m).max() if m.size else 0.0
    if norm_max == 0.0:
        raise SingularMatrixError("zero matrix")
    with warnings.catch_warnings():
        # zero pivots are reported via SingularMatrixError below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
    if np.abs(np.diag(lu)).min() < 1e-12 * norm_max:
        raise SingularMatrixError("pivot below 1e-12 * max|M|")
    x = scipy.linalg.lu_solve((lu, piv), v, check_finite=False)
    x += scipy.linalg.lu_solve((lu, piv), v - m @ x, check_finite=False)
    return x


def sym_min_eig(m: np.ndarray) -> float:
    """Smallest eigenvalue of the symmetric part (m + m.T) / 2."""
    m = np.asarray(m, dtype=float)
    return float(np.linalg.eigvalsh((m + m.T) / 2.0)[0])


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root D of a symmetric PSD matrix, D @ D ~ m.

    Eigenvalues within -1e-9 of zero (rounding noise from products like
    A.T @ A) are clamped to 0. Raises NotSymmetricError when the asymmetry
    exceeds 1e-9 * max(1, max|m|).
    """
    m = np.asarray(m, dtype=float)
    scale = max(1.0, np.abs(m).max())
    if np.abs(m - m.T).max() > 1e-9 * scale:
        raise NotSymmetricError("matrix asymmetry exceeds tolerance")
    w, q = np.linalg.eigh((m + m.T) / 2.0)
    w = np.clip(w, 0.0, None)
    d = (q * np.sqrt(w)) @ q.T
    return (d + d.T) / 2.0
