"""Dense Hermitian linear algebra kernels.

Everything here operates on small dense complex matrices (desk scale,
dim <= 64): eigendecompositions, fractional powers with a stabilized
zero-eigenvalue convention, Kronecker products and Schatten norms.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

# Entrywise Hermitian symmetry tolerance.
HERMITIAN_ATOL = 1e-12
# Eigenvalues below -PSD_RTOL * max|eig| fail the positive-semidefinite check.
PSD_RTOL = 1e-10
# Eigenvalues <= SPECTRUM_ZERO_RTOL * lambda_max are treated as exactly zero
# by mat_pow, which makes S^0 (the support projector) and small fractional
# powers numerically stable.
SPECTRUM_ZERO_RTOL = 1e-12
# Trace tolerance for density operators.
DENSITY_TRACE_ATOL = 1e-10


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """Coerce to a square complex ndarray."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {M.shape}")
    return M


def hermitize(A: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (A + A^dag) / 2."""
    return 0.5 * (A + A.conj().T)


def require_hermitian(A, *, atol: float = HERMITIAN_ATOL, name: str = "matrix") -> np.ndarray:
    """Validate Hermitian symmetry entrywise and return the symmetrized matrix."""
    M = as_matrix(A, name)
    dev = np.abs(M - M.conj().T).max() if M.size else 0.0
    if dev > atol:
        raise ValidationError(f"{name} is not Hermitian: max asymmetry {dev:.3e} > {atol:.1e}")
    return hermitize(M)


def require_psd(A, *, name: str = "matrix") -> np.ndarray:
    """Validate that A is Hermitian positive semidefinite."""
    M = require_hermitian(A, name=name)
    w = np.linalg.eigvalsh(M)
    scale = np.abs(w).max() if w.size else 0.0
    if w.size and w[0] < -PSD_RTOL * max(scale, 1e-300):
        raise ValidationError(
            f"{name} is not positive semidefinite: min eigenvalue {w[0]:.3e}"
        )
    return M


def require_density(A, *, name: str = "matrix") -> np.ndarray:
    """Validate that A is a density operator (PSD, unit trace)."""
    M = require_psd(A, name=name)
    tr = M.trace().real
    if abs(tr - 1.0) > DENSITY_TRACE_ATOL:
        raise ValidationError(f"{name} has trace {tr:.12f}, expected 1")
    return M


def eig_hermitian(H) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues sorted in
    descending order and eigenvectors as the columns of a unitary matrix,
    so that H = V @ diag(w) @ V^dag.
    """
    M = require_hermitian(H)
    w, V = np.linalg.eigh(M)
    return w[::-1].copy(), V[:, ::-1].copy()


def mat_pow(S, a: float) -> np.ndarray:
    """Fractional power S^a of a PSD matrix via its eigendecomposition.

    Eigenvalues at or below the relative zero threshold are mapped to 0
    for every a >= 0, with the convention 0^0 = 0.  In particular
    mat_pow(S, 0) is the projector onto the support of S.
    """
    if a < 0:
        raise ValueError(f"exponent must be >= 0, got {a}")
    M = require_hermitian(S)
    w, V = np.linalg.eigh(M)
    lam_max = w[-1] if w.size else 0.0
    scale = np.abs(w).max() if w.size else 0.0
    if w.size and w[0] < -PSD_RTOL * max(scale, 1e-300):
        raise ValidationError(f"matrix is not PSD: min eigenvalue {w[0]:.3e}")
    if a == 1.0:
        return M
    thr = SPECTRUM_ZERO_RTOL * max(lam_max, 0.0)
    nz = w > thr
    out = np.zeros_like(w)
    out[nz] = w[nz] ** a
    return hermitize((V * out) @ V.conj().T)


def support_projector(S) -> np.ndarray:
    """Projector onto the support (range) of a PSD matrix; equals mat_pow(S, 0)."""
    return mat_pow(S, 0.0)


def kron(A, B) -> np.ndarray:
    """Kronecker product of two Hermitian matrices."""
    MA = require_hermitian(A, name="left factor")
    MB = require_hermitian(B, name="right factor")
    return np.kron(MA, MB)


def schatten_norm(A, r: float) -> float:
    """Schatten r-norm of a PSD matrix, (sum_i lambda_i^r)^(1/r).

    Accepts r = inf for the operator norm (largest eigenvalue).
    """
    if r < 1:
        raise ValueError(f"Schatten norm requires r >= 1, got {r}")
    M = require_psd(A)
    lam = np.clip(np.linalg.eigvalsh(M), 0.0, None)
    m = lam.max() if lam.size else 0.0
    if m <= 0.0:
        return 0.0
    if np.isinf(r):
        return float(m)
    return float(m * np.sum((lam / m) ** r) ** (1.0 / r))
