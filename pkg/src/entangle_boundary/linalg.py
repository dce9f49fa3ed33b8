"""Dense complex linear algebra for 2x2 and 4x4 matrices."""

from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import (
    ConvergenceFailure,
    DegenerateBlockFailure,
    NonPositiveInput,
    NotHermitian,
    NotPositive,
    NotSymmetric,
)

JACOBI_REL_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
LOG_MEAN_SWITCH = 1e-9


class HermEig(NamedTuple):
    values: np.ndarray  # ascending, real
    vectors: np.ndarray  # unitary, eigenvectors as columns


class TakagiFactor(NamedTuple):
    unitary: np.ndarray
    singulars: np.ndarray  # descending, non-negative


def kron(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError(f"kron expects matrices, got shapes {a.shape} and {b.shape}")
    return np.kron(a, b)


def _fro(m):
    return float(np.linalg.norm(m))


def eig_hermitian(h, hermiticity_tol=1e-12):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Values come back ascending. Each eigenvector has its largest-magnitude
    component real and positive, so identical inputs give identical outputs.
    """
    h = np.ascontiguousarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"square matrix required, got shape {h.shape}")
    scale = _fro(h)
    if _fro(h - h.conj().T) > hermiticity_tol * max(scale, 1e-300):
        raise NotHermitian(f"||h - h^dagger|| exceeds {hermiticity_tol:g} * ||h||")
    values, vectors, _, ok = kernels.jacobi_hermitian(h, JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)
    if not ok:
        raise ConvergenceFailure(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    return HermEig(values, vectors)


def takagi(s, symmetry_tol=1e-12):
    """Takagi factorization ``s = U diag(d) U^T`` of a complex symmetric matrix.

    Solved through the real symmetric embedding ``[[X, Y], [Y, -X]]`` of
    ``s = X + iY``: its eigenvalues come in pairs +-d, and each eigenvector
    (a, b) for +d gives a Takagi vector a + ib. Any orthonormal basis of the
    positive eigenspace yields a unitary, so degenerate d need no special care.
    """
    s = np.asarray(s, dtype=np.complex128)
    n = s.shape[0]
    if s.ndim != 2 or s.shape[1] != n:
        raise ValueError(f"square matrix required, got shape {s.shape}")
    scale = _fro(s)
    if _fro(s - s.T) > symmetry_tol * max(scale, 1e-300):
        raise NotSymmetric("||s - s^T|| exceeds tolerance")
    if scale == 0.0:
        return TakagiFactor(np.eye(n, dtype=complex), np.zeros(n))

    x, y = s.real, s.imag
    emb = np.block([[x, y], [y, -x]]).astype(np.complex128)
    vals, vecs, _, ok = kernels.jacobi_hermitian(emb, JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)
    if not ok:
        raise ConvergenceFailure("Jacobi did not converge on the Takagi embedding")
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order].real
    cutoff = 1e-13 * vals[0]
    npos = int(np.sum(vals[:n] > cutoff))
    u = vecs[:n, :npos] + 1j * vecs[n:, :npos]
    d = np.zeros(n)
    d[:npos] = vals[:npos]
    if npos < n:
        # remaining columns span the null space of conj(s); any orthonormal basis works
        q, _ = np.linalg.qr(np.hstack([u, np.eye(n, dtype=complex)]))
        u = np.hstack([u, q[:, npos:n]])
    if _fro(u.conj().T @ u - np.eye(n)) > 1e-10:
        raise DegenerateBlockFailure("Takagi vectors are not orthonormal")
    return TakagiFactor(u, d)


def sqrt_psd(h):
    """Principal square root of a Hermitian positive semidefinite matrix."""
    vals, vecs = eig_hermitian(h)
    if vals[0] < -1e-12:
        raise NotPositive(f"eigenvalue {vals[0]:.3e} below -1e-12", vals[0])
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


def inv_sqrt_pd(h):
    vals, vecs = eig_hermitian(h)
    if vals[0] <= 1e-14:
        raise NotPositive(f"eigenvalue {vals[0]:.3e} not positive", vals[0])
    return (vecs / np.sqrt(vals)) @ vecs.conj().T


def ln_pd(h):
    """Principal logarithm of a Hermitian positive definite matrix."""
    vals, vecs = eig_hermitian(h)
    if vals[0] <= 1e-14:
        raise NotPositive(f"eigenvalue {vals[0]:.3e} not positive", vals[0])
    return (vecs * np.log(vals)) @ vecs.conj().T


def log_mean(a, b):
    """Logarithmic mean (a - b) / (ln a - ln b), equal to a when a == b."""
    a = float(a)
    b = float(b)
    if not (a > 0.0 and b > 0.0):
        raise NonPositiveInput(f"log_mean needs positive inputs, got {a!r}, {b!r}")
    return kernels.log_mean_scalar(a, b, LOG_MEAN_SWITCH)


def log_mean_matrix(gamma):
    """G[i, j] = log_mean(gamma_i, gamma_j); G[i, i] = gamma_i; 0 when exactly one is 0."""
    gamma = np.ascontiguousarray(gamma, dtype=float)
    if np.any(gamma < 0.0):
        raise NonPositiveInput("negative eigenvalue passed to log_mean_matrix")
    return kernels.log_mean_matrix(gamma, LOG_MEAN_SWITCH)
