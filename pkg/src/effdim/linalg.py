"""Numerically careful helpers for symmetric matrices.

All covariance handling goes through this module: symmetry is enforced (or
rejected) once at ingestion, factorizations use Cholesky, and log-determinants
are read off triangular factors. No densities or determinants are ever formed
in non-log space.
"""

import numpy as np
import scipy.linalg as sla

from .errors import AsymmetricMatrix, DimensionMismatch, NotPositiveDefinite

# Relative asymmetry accepted before a matrix is rejected outright.
SYMMETRY_RTOL = 1e-12

# Relative eigenvalue cutoff below which spectral mass counts as zero rank.
RANK_RTOL = 1e-12


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Copy input to a float 2-D array, raising DimensionMismatch otherwise."""
    arr = np.array(m, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got ndim={arr.ndim}")
    return arr


def symmetrize(m, name: str = "matrix") -> np.ndarray:
    """Return (M + M^T)/2 if M is symmetric within tolerance, else reject.

    The tolerance is relative: max|M - M^T| <= SYMMETRY_RTOL * max|M|.
    An exactly zero matrix passes trivially.
    """
    arr = as_matrix(m, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    scale = np.abs(arr).max()
    asym = np.abs(arr - arr.T).max()
    if asym > SYMMETRY_RTOL * scale:
        raise AsymmetricMatrix(
            f"{name} asymmetry {asym:.3e} exceeds {SYMMETRY_RTOL:g} * {scale:.3e}"
        )
    return 0.5 * (arr + arr.T)


def cholesky_lower(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Lower Cholesky factor; raises NotPositiveDefinite on failure."""
    try:
        return sla.cholesky(m, lower=True)
    except sla.LinAlgError as exc:
        raise NotPositiveDefinite(f"{name} is not positive definite: {exc}") from exc


def logdet_from_cholesky(lower: np.ndarray) -> float:
    """log det(A) from the lower Cholesky factor of A."""
    return 2.0 * float(np.sum(np.log(np.diag(lower))))


def validate_psd(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Check PSD up to a small relative negative tolerance; return eigenvalues.

    Eigenvalues more negative than -1e-8 * max_eig are rejected; smaller
    negative values are floating-point noise and are clipped to zero in the
    returned (descending) array.
    """
    eigs = np.linalg.eigvalsh(m)
    max_eig = max(float(eigs[-1]), 0.0)
    if float(eigs[0]) < -1e-8 * max_eig:
        raise NotPositiveDefinite(
            f"{name} has eigenvalue {eigs[0]:.3e} below the PSD tolerance"
        )
    return np.clip(eigs[::-1], 0.0, None)


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Symmetric square root of a PSD matrix via eigendecomposition.

    Slightly negative eigenvalues (within the PSD tolerance) are clipped to
    zero, so a zero matrix maps to an exactly zero square root.
    """
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ v.T
    return 0.5 * (root + root.T)


def solve_lower(lower: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve L x = b for lower-triangular L."""
    return sla.solve_triangular(lower, b, lower=True)


def descending_clipped(eigs: np.ndarray) -> np.ndarray:
    """Sort eigenvalues nonincreasing and clip negatives to exactly zero."""
    out = np.sort(np.asarray(eigs, dtype=float))[::-1]
    return np.clip(out, 0.0, None)


def truncate_small(values: np.ndarray, rtol: float = RANK_RTOL) -> tuple[np.ndarray, int]:
    """Zero out entries below rtol * leading value; return (values, rank).

    Input must be sorted nonincreasing and nonnegative. Rank is the count of
    strictly positive retained entries.
    """
    vals = np.array(values, dtype=float)
    if vals.size == 0 or vals[0] <= 0.0:
        return np.zeros_like(vals), 0
    cutoff = rtol * vals[0]
    vals[vals <= cutoff] = 0.0
    return vals, int(np.count_nonzero(vals))
