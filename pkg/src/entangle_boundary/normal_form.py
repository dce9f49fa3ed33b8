"""Wootters decomposition, local-filtering normal form and Gram matrices."""

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import ConvergenceFailure, RankDeficient, TildeOrthonormalityFailure
from .linalg import eig_hermitian, inv_sqrt_pd, kron, takagi
from .states import MAGIC_BASIS, PAULIS, YY, bell_diagonal, reduced_states

FULL_RANK_TOL = 1e-10
SINKHORN_TOL = 1e-10
SINKHORN_MAX_ITER = 10_000

# correlation signs t_k = <e_i| sigma_k (x) sigma_k |e_i> for the magic basis rows
_BELL_SIGNS = np.array(
    [
        [1.0, -1.0, 1.0],
        [1.0, 1.0, -1.0],
        [-1.0, -1.0, -1.0],
        [-1.0, 1.0, 1.0],
    ]
)


@dataclass(frozen=True)
class WoottersBasis:
    phi: np.ndarray  # columns |phi_i>
    lam: np.ndarray  # descending weights

    @property
    def concurrence(self):
        return float(self.lam[0] - self.lam[1] - self.lam[2] - self.lam[3])

    def density(self):
        return (self.phi * self.lam) @ self.phi.conj().T

    def tilde_overlaps(self):
        """Matrix <phi_i|tilde phi_j>; the identity for a valid basis."""
        return self.phi.conj().T @ YY @ self.phi.conj()


@dataclass(frozen=True)
class FilterNormalForm:
    fa: np.ndarray
    fb: np.ndarray
    p: np.ndarray  # canonical Bell weights, p[0] maximal, p[1:] descending
    norm: float

    def density(self):
        f = kron(self.fa, self.fb)
        return f @ bell_diagonal(self.p) @ f.conj().T / self.norm


@dataclass(frozen=True)
class GramMatrices:
    Q: np.ndarray
    Pi: np.ndarray


def _fix_sign(v):
    # the spin flip is antilinear, so only a real sign keeps <phi|tilde phi> = 1
    mag = np.abs(v)
    piv = int(np.argmax(mag >= mag.max() * (1.0 - 1e-8)))
    return -v if (v[piv].real + v[piv].imag) < 0.0 else v


def wootters_decomposition(rho):
    """Decompose a full-rank state as sum_i lam_i |phi_i><phi_i| with <phi_i|tilde phi_j> = delta_ij."""
    rho = np.asarray(rho, dtype=complex)
    gam, vecs = eig_hermitian(rho)
    if gam[0] < FULL_RANK_TOL:
        raise RankDeficient(f"minimum eigenvalue {gam[0]:.3e} below {FULL_RANK_TOL:g}")
    v = vecs * np.sqrt(gam)
    tau = v.conj().T @ YY @ v.conj()
    tau = 0.5 * (tau + tau.T)
    u, d = takagi(tau)
    x = v @ u
    phi = np.column_stack([_fix_sign(x[:, i] / np.sqrt(d[i])) for i in range(4)])
    basis = WoottersBasis(phi, d.copy())
    if np.linalg.norm(basis.tilde_overlaps() - np.eye(4)) > 1e-10:
        raise TildeOrthonormalityFailure("recovered basis is not tilde-orthonormal")
    return basis


def gram_matrices(basis):
    """Q_ij = <phi_i|phi_j>, Pi_ij = <tilde phi_i|tilde phi_j> = conj(Q_ij)."""
    q = basis.phi.conj().T @ basis.phi
    return GramMatrices(q, q.conj())


def _su2_from_rotation(r):
    """U with U sigma_i U^dagger = sum_j r[j, i] sigma_j."""
    x, y, z, w = Rotation.from_matrix(r).as_quat()
    return w * np.eye(2) - 1j * (x * PAULIS[0] + y * PAULIS[1] + z * PAULIS[2])


def _proper_signed_permutations():
    out = []
    for perm in itertools.permutations(range(3)):
        base = np.zeros((3, 3))
        base[list(perm), range(3)] = 1.0
        for signs in itertools.product((1.0, -1.0), repeat=3):
            m = base * np.array(signs)
            if np.linalg.det(m) > 0:
                out.append(m)
    return out


_SIGNED_PERMS = _proper_signed_permutations()


def _correlations(rho):
    return np.array(
        [[np.trace(rho @ kron(si, sj)).real for sj in PAULIS] for si in PAULIS]
    )


def _det_one(f):
    return f / np.sqrt(complex(np.linalg.det(f)))


def filter_normal_form(rho, tol=SINKHORN_TOL, max_iter=SINKHORN_MAX_ITER):
    """Write a full-rank state as (F_A (x) F_B) rho_BD (F_A (x) F_B)^dagger / N.

    Alternately whitens the two marginals until both equal I/2, then rotates
    the resulting Bell-diagonal state into the magic basis with p sorted
    descending (p[0] maximal).
    """
    rho = np.asarray(rho, dtype=complex)
    if eig_hermitian(rho).values[0] < FULL_RANK_TOL:
        raise RankDeficient("filter normal form needs a full-rank state")
    la = np.eye(2, dtype=complex)
    lb = np.eye(2, dtype=complex)
    cur = rho.copy()
    half = 0.5 * np.eye(2)
    for _ in range(max_iter):
        ra, rb = reduced_states(cur)
        if np.linalg.norm(ra - half) <= tol and np.linalg.norm(rb - half) <= tol:
            break
        a = inv_sqrt_pd(ra)
        f = kron(a, np.eye(2))
        cur = f @ cur @ f.conj().T
        cur /= np.trace(cur).real
        la = a @ la
        _, rb = reduced_states(cur)
        b = inv_sqrt_pd(rb)
        f = kron(np.eye(2), b)
        cur = f @ cur @ f.conj().T
        cur /= np.trace(cur).real
        lb = b @ lb
    else:
        raise ConvergenceFailure(f"marginals not whitened after {max_iter} iterations")

    # signed SVD of the correlation matrix with proper rotations on both sides
    t = _correlations(cur)
    ua, s, vbt = np.linalg.svd(t)
    oa, ob = ua, vbt.T
    if np.linalg.det(oa) < 0:
        oa = oa.copy()
        oa[:, 2] *= -1
        s = s * np.array([1, 1, -1])
    if np.linalg.det(ob) < 0:
        ob = ob.copy()
        ob[:, 2] *= -1
        s = s * np.array([1, 1, -1])

    best = None
    for pm in _SIGNED_PERMS:
        for pn in _SIGNED_PERMS:
            tt = pm.T @ np.diag(s) @ pn
            if np.linalg.norm(tt - np.diag(np.diag(tt))) > 1e-12:
                continue
            p = 0.25 * (1.0 + _BELL_SIGNS @ np.diag(tt))
            key = tuple(np.round(p, 12))
            if best is None or key > best[0]:
                best = (key, p, oa @ pm, ob @ pn)
    _, p, ra_rot, rb_rot = best
    wa = _su2_from_rotation(ra_rot)
    wb = _su2_from_rotation(rb_rot)
    # (wa^dagger la) (x) (wb^dagger lb) maps rho to rho_BD up to normalization
    fa = _det_one(np.linalg.inv(wa.conj().T @ la))
    fb = _det_one(np.linalg.inv(wb.conj().T @ lb))
    f = kron(fa, fb)
    norm = float(np.trace(f @ bell_diagonal(p) @ f.conj().T).real)
    return FilterNormalForm(fa, fb, p, norm)

