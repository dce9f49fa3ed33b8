import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entangle_boundary.errors import InvalidState, SupportViolation
from entangle_boundary.states import (
    MAGIC_BASIS,
    PHI_PLUS,
    YY,
    apply_local_filter,
    as_density,
    bell_diagonal,
    concurrence_signed,
    partial_transpose,
    ppt_min_eigenvalue,
    random_density,
    random_filter,
    random_local_unitary,
    reduced_states,
    relative_entropy,
    tilde_op,
    tilde_state,
    trace_distance,
)


def test_magic_basis_orthonormal_and_tilde_invariant():
    np.testing.assert_allclose(MAGIC_BASIS.conj().T @ MAGIC_BASIS, np.eye(4), atol=1e-15)
    for k in range(4):
        np.testing.assert_allclose(tilde_state(MAGIC_BASIS[:, k]), MAGIC_BASIS[:, k], atol=1e-15)


def test_spin_flip_definitions(rng):
    rho = random_density(rng)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert np.allclose(tilde_op(np.outer(v, v.conj())), np.outer(tilde_state(v), tilde_state(v).conj()))
    np.testing.assert_allclose(tilde_op(tilde_op(rho)), rho, atol=1e-15)
    np.testing.assert_allclose(YY, YY.T)


def test_concurrence_pure_states_match_overlap_formula(rng):
    for _ in range(50):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        c = concurrence_signed(np.outer(v, v.conj()))
        assert c == pytest.approx(abs(np.vdot(v, tilde_state(v))), abs=1e-7)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=4, max_size=4))
def test_concurrence_bell_diagonal_closed_form(w):
    w = np.array(w)
    if w.sum() < 1e-3:
        return
    p = w / w.sum()
    assert concurrence_signed(bell_diagonal(p)) == pytest.approx(2 * p.max() - 1, abs=1e-7)


def test_concurrence_reference_values():
    assert concurrence_signed(np.outer(PHI_PLUS, PHI_PLUS.conj())) == pytest.approx(1.0, abs=1e-7)
    assert concurrence_signed(np.eye(4) / 4) == pytest.approx(-0.5, abs=1e-15)
    prod = np.zeros((4, 4), dtype=complex)
    prod[0, 0] = 1.0
    assert concurrence_signed(prod) == pytest.approx(0.0, abs=1e-15)


def test_concurrence_invariant_under_local_unitaries(rng):
    for _ in range(30):
        rho = random_density(rng)
        ua, ub = random_local_unitary(rng)
        moved = apply_local_filter(rho, ua, ub)
        assert concurrence_signed(moved) == pytest.approx(concurrence_signed(rho), abs=1e-10)


def test_ppt_and_concurrence_agree_on_entanglement(rng):
    for _ in range(200):
        rho = random_density(rng)
        c = concurrence_signed(rho)
        if abs(c) > 1e-6:
            assert (c > 0) == (ppt_min_eigenvalue(rho) < 0)
    assert ppt_min_eigenvalue(np.outer(PHI_PLUS, PHI_PLUS.conj())) == pytest.approx(-0.5)


def test_partial_transpose_involution(rng):
    rho = random_density(rng)
    np.testing.assert_allclose(partial_transpose(partial_transpose(rho)), rho)
    a, b = reduced_states(rho)
    np.testing.assert_allclose(reduced_states(partial_transpose(rho))[0], a, atol=1e-15)
    assert np.trace(a).real == pytest.approx(1.0) and np.trace(b).real == pytest.approx(1.0)


def test_reduced_states_of_product():
    a = np.diag([0.7, 0.3]).astype(complex)
    b = np.array([[0.5, 0.2j], [-0.2j, 0.5]])
    ra, rb = reduced_states(np.kron(a, b))
    np.testing.assert_allclose(ra, a, atol=1e-15)
    np.testing.assert_allclose(rb, b, atol=1e-15)


def test_relative_entropy_commuting_matches_kl(rng):
    for _ in range(20):
        p = rng.dirichlet(np.ones(4))
        q = rng.dirichlet(np.ones(4))
        kl = float(np.sum(p * np.log(p / q)))
        assert relative_entropy(np.diag(p), np.diag(q)) == pytest.approx(kl, rel=1e-12)


def test_relative_entropy_support(rng):
    rho = random_density(rng)
    assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(SupportViolation):
        relative_entropy(rho, np.diag([1.0, 0.0, 0.0, 0.0]).astype(complex))
    pure = np.outer(PHI_PLUS, PHI_PLUS.conj())
    sigma = np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex)
    assert relative_entropy(pure, sigma) == pytest.approx(np.log(2.0), abs=1e-14)


def test_as_density_validation():
    with pytest.raises(InvalidState):
        as_density(np.eye(3) / 3)
    with pytest.raises(InvalidState):
        as_density(np.eye(4) / 4 + 0.1 * np.triu(np.ones((4, 4)), 1))
    with pytest.raises(InvalidState):
        as_density(np.eye(4) / 4 * 1.01)
    with pytest.raises(InvalidState):
        as_density(np.diag([1.2, -0.2, 0.0, 0.0]))
    tiny = np.diag([0.5 + 5e-11, 0.5, 0.0, -5e-11]).astype(complex)
    clamped = as_density(tiny)
    assert np.linalg.eigvalsh(clamped)[0] >= 0.0
    assert np.trace(clamped).real == pytest.approx(1.0, abs=1e-15)


def test_random_filter_condition_and_det(rng):
    for _ in range(100):
        f = random_filter(rng, 10.0)
        s = np.linalg.svd(f, compute_uv=False)
        assert s[0] / s[1] <= 10.0 + 1e-9
        assert abs(np.linalg.det(f)) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        random_filter(rng, 0.5)


def test_random_density_rank(rng):
    for r in range(1, 5):
        vals = np.linalg.eigvalsh(random_density(rng, rank=r))
        assert np.sum(vals > 1e-12) == r
    with pytest.raises(ValueError):
        random_density(rng, rank=5)


def test_trace_distance_basic():
    a = np.diag([1.0, 0, 0, 0]).astype(complex)
    b = np.diag([0, 1.0, 0, 0]).astype(complex)
    assert trace_distance(a, b) == pytest.approx(1.0)
    assert trace_distance(a, a) == 0.0
