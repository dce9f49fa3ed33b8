"""Boundary states (signed concurrence zero) and the normal direction at each of them.

A boundary state is built from two local filters and Bell weights
(1/2, p1, p2, p3). Its entangled partners are rho(x) = sigma + x*delta, where
delta is assembled in sigma's eigenbasis as

    Delta^E = (U sqrt(Pi) W sqrt(Pi) U^dagger) o G,   W = diag(1, -1, -1, -1),

with ``o`` the entrywise product and G the logarithmic means of sigma's
eigenvalues. sigma is the closest separable state of every rho(x), x >= 0,
under the relative entropy.
"""

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    BoundaryViolation,
    NotPositive,
    RankDeficientSigma,
    SimplexViolation,
    SingularFilter,
)
from .linalg import eig_hermitian, kron, log_mean_matrix, sqrt_psd
from .normal_form import GramMatrices, WoottersBasis, gram_matrices, wootters_decomposition
from .states import (
    MAGIC_BASIS,
    PAULIS,
    YY,
    concurrence_signed,
    random_filter,
    relative_entropy,
)

W_DIAG = np.array([1.0, -1.0, -1.0, -1.0])
RESIDUAL_TOL = 1e-8
SIMPLEX_TOL = 1e-12
SIGMA_FULL_RANK_TOL = 1e-10

_I2 = np.eye(2, dtype=complex)
# Bob's Paulis first, then Alice's
LOCAL_PAULIS = tuple(kron(_I2, s) for s in PAULIS) + tuple(kron(s, _I2) for s in PAULIS)


@dataclass(frozen=True)
class NormalVector:
    delta: np.ndarray  # computational basis, Hermitian, traceless
    deltaE: np.ndarray  # sigma's eigenbasis
    deltaL: np.ndarray  # Wootters representation
    deltaC: float  # Tr(deltaL W): first-order growth of the concurrence along delta
    M: np.ndarray  # U sqrt(Pi) W sqrt(Pi) U^dagger


@dataclass(frozen=True)
class BoundaryState:
    sigma: np.ndarray
    basis: WoottersBasis
    gram: GramMatrices
    gamma: np.ndarray  # eigenvalues of sigma, descending
    eigvecs: np.ndarray  # columns |i>, consistent with U
    U: np.ndarray
    G: np.ndarray
    sqrt_Q: np.ndarray
    sqrt_Pi: np.ndarray
    W: np.ndarray = field(default_factory=lambda: np.diag(W_DIAG))
    epsilon: Optional[float] = None  # set when built by the low-rank regularization

    @property
    def lam(self):
        return self.basis.lam

    @cached_property
    def normal(self):
        return normal_vector(self)

    @cached_property
    def x_max(self):
        return x_max_psd(self)

    def ray(self, x):
        return entangled_ray(self, x)


class RayPoint(NamedTuple):
    x: float
    rho: np.ndarray
    s_exact: float
    c_signed: float


class WRank(NamedTuple):
    rank: int
    min_singular: float
    diagonal_residual: float


def _det_one_filter(f):
    f = np.asarray(f, dtype=complex)
    if f.shape != (2, 2):
        raise SingularFilter(f"filter must be 2x2, got {f.shape}")
    det = complex(np.linalg.det(f))
    if abs(det) < 1e-14 or np.linalg.cond(f) > 1e12:
        raise SingularFilter("filter is singular")
    return f / np.sqrt(det)


def _assemble(sigma, basis, epsilon=None):
    gram = gram_matrices(basis)
    sqrt_q = sqrt_psd(gram.Q)
    sqrt_pi = sqrt_psd(gram.Pi)
    h = sqrt_q @ np.diag(basis.lam) @ sqrt_q
    vals, vecs = eig_hermitian(0.5 * (h + h.conj().T))
    order = np.argsort(-vals, kind="stable")
    gamma = vals[order]
    u = vecs[:, order].conj().T
    # sigma = Phi Lambda Phi^dagger = (Phi sqrt(Pi)) sqrt(Q) Lambda sqrt(Q) (Phi sqrt(Pi))^dagger,
    # and Phi sqrt(Pi) is unitary, so its product with U^dagger diagonalizes sigma
    eigvecs = basis.phi @ sqrt_pi @ u.conj().T
    g = log_mean_matrix(np.clip(gamma, 0.0, None))
    return BoundaryState(
        sigma=sigma,
        basis=basis,
        gram=gram,
        gamma=gamma,
        eigvecs=eigvecs,
        U=u,
        G=g,
        sqrt_Q=sqrt_q,
        sqrt_Pi=sqrt_pi,
        epsilon=epsilon,
    )


def _check_simplex(p, *, open_interval=True):
    p = np.asarray(p, dtype=float)
    if abs(p.sum() - 0.5) > SIMPLEX_TOL:
        raise SimplexViolation(f"p1 + p2 + p3 = {p.sum()!r}, expected 1/2")
    lo_ok = np.all(p > 0.0) if open_interval else np.all(p >= 0.0)
    hi_ok = np.all(p < 0.5) if open_interval else np.all(p <= 0.5)
    if not (lo_ok and hi_ok):
        raise SimplexViolation(f"weights {p.tolist()} outside the allowed range")
    return p


def make_boundary_state(fa, fb, p1, p2, p3, *, _epsilon=None):
    """sigma = (F_A (x) F_B) sigma_BD (F_A (x) F_B)^dagger / N with sigma_BD weights (1/2, p1, p2, p3).

    The Wootters basis is taken directly as phi_i = (F_A (x) F_B) e_i, which is
    tilde-orthonormal once both filters have unit determinant.
    """
    p_rest = _check_simplex([p1, p2, p3])
    fa = _det_one_filter(fa)
    fb = _det_one_filter(fb)
    p = np.concatenate([[0.5], p_rest])
    phi = kron(fa, fb) @ MAGIC_BASIS
    norm = float(np.sum(p * np.sum(np.abs(phi) ** 2, axis=0)))
    lam = p / norm
    order = np.concatenate([[0], 1 + np.argsort(-lam[1:], kind="stable")])
    basis = WoottersBasis(phi[:, order], lam[order])
    return _assemble(basis.density(), basis, epsilon=_epsilon)


def boundary_state_limit(fa, fb, p1, p2, p3, epsilon):
    """Full-rank stand-in for a low-rank boundary state.

    Zero weights are raised to ``epsilon`` and the others rescaled so the
    weights still sum to 1/2; let ``epsilon -> 0`` to reach the limit.
    """
    p = _check_simplex([p1, p2, p3], open_interval=False)
    zero = p == 0.0
    if not np.any(zero):
        raise SimplexViolation("boundary_state_limit needs at least one zero weight")
    if not 0.0 < epsilon <= 1e-3:
        raise ValueError("epsilon must lie in (0, 1e-3]")
    rest = p[~zero].sum()
    q = np.where(zero, epsilon, p * (0.5 - epsilon * zero.sum()) / rest)
    return make_boundary_state(fa, fb, *q, _epsilon=float(epsilon))


def boundary_state_from_sigma(sigma, c_tol=1e-6):
    """Boundary state of an externally supplied sigma (Wootters basis via Takagi)."""
    sigma = np.asarray(sigma, dtype=complex)
    basis = wootters_decomposition(sigma)
    if abs(basis.concurrence) > c_tol:
        raise BoundaryViolation(f"signed concurrence {basis.concurrence:.3e} is not zero")
    return _assemble(sigma, basis)


def sample_boundary_params(rng, max_condition=10.0, margin=1e-3):
    """Filters of bounded condition and (p1, p2, p3) uniform on the simplex, kept ``margin`` off its edges."""
    rng = np.random.default_rng(rng)
    while True:
        p = 0.5 * rng.dirichlet(np.ones(3))
        if np.all(p > margin) and np.all(p < 0.5 - margin):
            break
    fa = random_filter(rng, max_condition)
    fb = random_filter(rng, max_condition)
    return fa, fb, p


def random_boundary_state(rng, max_condition=10.0, margin=1e-3):
    fa, fb, p = sample_boundary_params(rng, max_condition, margin)
    return make_boundary_state(fa, fb, *p)


def z_operator(rho, sigma):
    """int_0^inf (sigma + z)^-1 rho (sigma + z)^-1 dz - I, evaluated in sigma's eigenbasis."""
    gam, vecs = eig_hermitian(sigma)
    if gam[0] < SIGMA_FULL_RANK_TOL:
        raise RankDeficientSigma(f"sigma has eigenvalue {gam[0]:.3e}")
    re = vecs.conj().T @ rho @ vecs
    ze = re / log_mean_matrix(gam) - np.eye(len(gam))
    return vecs @ ze @ vecs.conj().T


def extremal_residuals(rho, bs):
    """The nine stationarity residuals of sigma for rho.

    Entries 0-2: |Tr (I x s_i) Z sigma|, 3-5: |Tr (s_i x I) Z sigma|,
    6-8: |<phi_i|Z|phi_i> + <phi_0|Z|phi_0>| for i = 1, 2, 3.
    """
    z = z_operator(rho, bs.sigma)
    zs = z @ bs.sigma
    local = [abs(np.trace(o @ zs)) for o in LOCAL_PAULIS]
    phi = bs.basis.phi
    zd = np.real(np.einsum("ji,jk,ki->i", phi.conj(), z, phi))
    sub = [abs(zd[i] + zd[0]) for i in range(1, 4)]
    return np.array(local + sub)


def _deltas(u, sqrt_pi, g, w):
    m = u @ sqrt_pi @ w @ sqrt_pi @ u.conj().T
    de = m * g
    dl = sqrt_pi @ u.conj().T @ de @ u @ sqrt_pi
    return m, de, dl


def normal_vector(bs):
    m, de, dl = _deltas(bs.U, bs.sqrt_Pi, bs.G, bs.W)
    delta = bs.eigvecs @ de @ bs.eigvecs.conj().T
    dc = float(np.real(np.trace(dl @ bs.W)))
    return NormalVector(delta=delta, deltaE=de, deltaL=dl, deltaC=dc, M=m)


def delta_c_hadamard(bs):
    """sum_ij |M_ij|^2 G_ij, the second expression for the concurrence growth rate."""
    m = bs.normal.M
    return float(np.sum(np.abs(m) ** 2 * bs.G))


def x_max_psd(bs):
    """Largest x >= 0 with sigma + x*delta positive semidefinite."""
    if bs.gamma[-1] <= 0.0:
        return 0.0
    s_inv_half = (bs.eigvecs / np.sqrt(bs.gamma)) @ bs.eigvecs.conj().T
    k = s_inv_half @ bs.normal.delta @ s_inv_half
    kmin = eig_hermitian(0.5 * (k + k.conj().T)).values[0]
    return -1.0 / kmin


def entangled_ray(bs, x):
    """rho(x) = sigma + x*delta with its relative entropy to sigma and signed concurrence."""
    x = float(x)
    rho = bs.sigma + x * bs.normal.delta
    lo = eig_hermitian(0.5 * (rho + rho.conj().T)).values[0]
    if lo < -1e-10:
        raise NotPositive(f"rho({x:g}) has eigenvalue {lo:.3e}; x exceeds x_max", lo)
    return RayPoint(
        x=x,
        rho=rho,
        s_exact=relative_entropy(rho, bs.sigma),
        c_signed=concurrence_signed(rho),
    )


def representation_change(bs, r_lambda):
    """Coefficients in sigma's eigenbasis from Wootters-basis coefficients: U sqrt(Q) R sqrt(Q) U^dagger."""
    return bs.U @ bs.sqrt_Q @ r_lambda @ bs.sqrt_Q @ bs.U.conj().T


def wootters_coefficients(bs, rho):
    """R^Lambda with rho = sum_ij R_ij |phi_i><phi_j|, via the dual (tilde) vectors."""
    dual = YY @ bs.basis.phi.conj()  # <tilde phi_i|phi_j> = delta_ij
    return dual.conj().T @ rho @ dual


def w_uniqueness_rank(bs, rel_cut=1e-10):
    """Rank of the 12x12 real system that the off-diagonal entries of W must satisfy.

    Each equation reads sum_lm <phi_l|O|tilde phi_m> W_ml lam_l = 0 for the six
    local Paulis O; W Hermitian leaves 12 real off-diagonal unknowns.
    """
    phi = bs.basis.phi
    tphi = YY @ phi.conj()
    lam = bs.lam
    coef = np.array([(phi.conj().T @ o @ tphi) * lam[:, None] for o in LOCAL_PAULIS])
    # coef[o, l, m] multiplies W[m, l]
    diag_res = float(np.max(np.abs(np.einsum("oll->ol", coef))))
    cols = []
    for m in range(4):
        for l in range(m + 1, 4):
            for unit in (1.0, 1j):
                w = np.zeros((4, 4), dtype=complex)
                w[m, l] = unit
                w[l, m] = np.conj(unit)
                val = np.einsum("olm,ml->o", coef, w)
                cols.append(np.concatenate([val.real, val.imag]))
    a = np.column_stack(cols)
    sv = np.linalg.svd(a, compute_uv=False)
    rank = int(np.sum(sv > rel_cut * sv[0]))
    return WRank(rank, float(sv[-1]), diag_res)


def fit_quadratic_law(bs, xs, order=5):
    """Fit S(rho(x)||sigma) = sum_k c_k x^k for k = 2..order.

    The fit is done on S/x^2 so every sample carries equal relative weight.
    Returns the coefficients; the first one is the quadratic (leading) term.
    """
    xs = np.asarray(xs, dtype=float)
    y = np.array([entangled_ray(bs, x).s_exact for x in xs]) / xs**2
    design = np.column_stack([xs**k for k in range(order - 1)])
    scale = np.abs(design).max(axis=0)
    coef, *_ = np.linalg.lstsq(design / scale, y, rcond=None)
    return coef / scale


def regauge(bs, d):
    """Same boundary state with U -> d U (d must commute with diag(gamma))."""
    return replace(bs, U=d @ bs.U, eigvecs=bs.eigvecs @ d.conj().T)
