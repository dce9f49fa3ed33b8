"""Two-qubit states: fixed bases, spin flip, signed concurrence, relative entropy."""

import numpy as np

from .errors import InvalidState, SupportViolation
from .linalg import eig_hermitian, kron

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)
YY = kron(SY, SY)  # real: antidiagonal (-1, 1, 1, -1)

PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)

# |e0> = i|phi+>, |el> = (I (x) sigma_l)|phi+>; every vector is its own spin flip
MAGIC_BASIS = np.column_stack(
    [1j * PHI_PLUS] + [kron(I2, s) @ PHI_PLUS for s in PAULIS]
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def tilde_state(v):
    """Spin flip of a vector: (sigma_y (x) sigma_y) conj(v)."""
    return YY @ np.conj(np.asarray(v, dtype=complex))


def tilde_op(m):
    """Spin flip of an operator: (sigma_y (x) sigma_y) conj(m) (sigma_y (x) sigma_y)."""
    return YY @ np.conj(np.asarray(m, dtype=complex)) @ YY


def as_density(m, *, clamp=True):
    """Validate a 4x4 density matrix and return it as a complex array.

    With ``clamp`` eigenvalues in [-PSD_TOL, 0) are set to zero and the trace
    renormalized; anything more negative is rejected.
    """
    m = np.array(m, dtype=complex)
    if m.shape != (4, 4):
        raise InvalidState(f"expected a 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidState("matrix has non-finite entries")
    if np.linalg.norm(m - m.conj().T) > HERMITIAN_TOL * max(np.linalg.norm(m), 1.0):
        raise InvalidState("matrix is not Hermitian")
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidState(f"trace {float(tr)!r} differs from 1")
    vals, vecs = eig_hermitian(m)
    if vals[0] < -PSD_TOL:
        raise InvalidState(f"minimum eigenvalue {vals[0]:.3e} is negative")
    if clamp and vals[0] < 0.0:
        vals = np.clip(vals, 0.0, None)
        m = (vecs * vals) @ vecs.conj().T
        m /= np.trace(m).real
    return m


def bell_diagonal(p):
    """sum_i p_i |e_i><e_i| in the magic basis."""
    p = np.asarray(p, dtype=float)
    return (MAGIC_BASIS * p) @ MAGIC_BASIS.conj().T


def concurrence_signed(rho):
    """lambda_0 - lambda_1 - lambda_2 - lambda_3, allowed to go negative."""
    rho = np.asarray(rho, dtype=complex)
    ev = np.linalg.eigvals(rho @ tilde_op(rho)).real
    lam = np.sort(np.sqrt(np.clip(ev, 0.0, None)))[::-1]
    return float(lam[0] - lam[1] - lam[2] - lam[3])


def entropy_terms(rho, sigma):
    """Return (Tr rho ln rho, Tr rho ln sigma) with 0 ln 0 = 0."""
    r_vals, _ = eig_hermitian(rho)
    r_vals = np.clip(r_vals, 0.0, None)
    nz = r_vals > 0.0
    neg_ent = float(np.sum(r_vals[nz] * np.log(r_vals[nz])))

    g_vals, g_vecs = eig_hermitian(sigma)
    diag = np.real(np.einsum("ji,jk,ki->i", g_vecs.conj(), rho, g_vecs))
    small = g_vals <= 1e-12
    if np.any(diag[small] > 1e-10):
        raise SupportViolation("rho has weight outside the support of sigma")
    cross = float(np.sum(diag[~small] * np.log(g_vals[~small])))
    return neg_ent, cross


def relative_entropy(rho, sigma):
    """S(rho || sigma) in nats."""
    neg_ent, cross = entropy_terms(rho, sigma)
    return max(neg_ent - cross, 0.0)


def partial_transpose(rho):
    """Partial transpose over the second qubit."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return r.transpose(0, 3, 2, 1).reshape(4, 4)


def ppt_min_eigenvalue(rho):
    return float(eig_hermitian(partial_transpose(rho)).values[0])


def reduced_states(rho):
    """Single-qubit marginals (rho_A, rho_B)."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return np.einsum("ikjk->ij", r), np.einsum("kikj->ij", r)


def apply_local_filter(rho, fa, fb):
    """(F_A (x) F_B) rho (F_A (x) F_B)^dagger / N."""
    f = kron(fa, fb)
    out = f @ rho @ f.conj().T
    return out / np.trace(out).real


def trace_distance(a, b):
    d = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)
    vals, _ = eig_hermitian(0.5 * (d + d.conj().T))
    return 0.5 * float(np.sum(np.abs(vals)))


def _haar_su2(rng):
    z = rng.normal(size=4)
    z /= np.linalg.norm(z)
    a = complex(z[0], z[1])
    b = complex(z[2], z[3])
    return np.array([[a, -b.conjugate()], [b, a.conjugate()]])


def random_density(rng, rank=4):
    """Ginibre-distributed density matrix of the given rank (1..4)."""
    if not 1 <= rank <= 4:
        raise ValueError("rank must be between 1 and 4")
    rng = np.random.default_rng(rng)
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_filter(rng, max_condition=10.0):
    """Random 2x2 filter with det 1 and singular-value ratio at most ``max_condition``."""
    if max_condition < 1.0:
        raise ValueError("max_condition must be >= 1")
    rng = np.random.default_rng(rng)
    kappa = rng.uniform(1.0, max_condition)
    s = np.sqrt(kappa)
    return _haar_su2(rng) @ np.diag([s, 1.0 / s]) @ _haar_su2(rng)


def random_local_unitary(rng):
    rng = np.random.default_rng(rng)
    return _haar_su2(rng), _haar_su2(rng)
