"""Spectral kernels: leading eigenpairs, the alignment change of basis, and
orthonormal completions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kone.linalg import (
    NonPositivePairing,
    Tolerances,
    build_alignment,
    leading_eigenpair,
    mean_matrix,
    orthonormal_completion,
)

from fixtures import MIXED_SIGN_PAIR


def test_diagonal_leading_pair():
    pd = leading_eigenpair(np.diag([2.0, 1.0]))
    assert pd.eigenvalue == pytest.approx(2.0)
    assert pd.simple
    assert abs(pd.right_vector[0]) == pytest.approx(1.0)
    assert pd.right_vector[1] == pytest.approx(0.0, abs=1e-12)


def test_identity_is_not_simple():
    pd = leading_eigenpair(np.eye(3))
    assert pd.eigenvalue == pytest.approx(1.0)
    assert not pd.simple
    assert not pd.geometric_simple


def test_rotation_has_no_leading_pair():
    assert leading_eigenpair(np.array([[0.0, -1.0], [1.0, 0.0]])) is None


def test_mixed_sign_member_has_unit_leading_eigenvalue():
    pd = leading_eigenpair(MIXED_SIGN_PAIR[0])
    assert pd is not None
    assert pd.eigenvalue == pytest.approx(1.0, rel=1e-9)
    assert pd.simple


def test_negative_leading_eigenvalue_gives_none():
    # spectrum {-2, 1}: the radius is attained only by a negative eigenvalue
    assert leading_eigenpair(np.diag([-2.0, 1.0])) is None


def test_modulus_tie_is_geometric_simple_but_not_simple():
    pd = leading_eigenpair(np.diag([2.0, -2.0]))
    assert pd is not None
    assert pd.eigenvalue == pytest.approx(2.0)
    assert pd.geometric_simple and not pd.simple


def test_tolerances_validate():
    with pytest.raises(ValueError):
        Tolerances(lp_feas=0.0)
    t = Tolerances.from_master(1e-7)
    assert t.lp_feas == pytest.approx(1e-7)
    assert t.member_margin == pytest.approx(1e-6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 6))
def test_transpose_has_same_leading_eigenvalue(seed, d):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((d, d))
    pd = leading_eigenpair(A)
    pdt = leading_eigenpair(A.T)
    if pd is None:
        assert pdt is None
    else:
        assert pdt is not None
        assert pdt.eigenvalue == pytest.approx(pd.eigenvalue, rel=1e-9, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 6))
def test_simple_pairs_have_small_residual(seed, d):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((d, d))
    pd = leading_eigenpair(A)
    if pd is not None and pd.simple:
        resid = np.linalg.norm(A @ pd.right_vector - pd.eigenvalue * pd.right_vector)
        assert resid <= 1e-8 * (1.0 + np.linalg.norm(A))


def test_mean_matrix_basics():
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.allclose(mean_matrix([A, A]), A)
    assert np.allclose(mean_matrix([np.eye(2), -np.eye(2)]), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        mean_matrix([])


def test_alignment_identity_case():
    e1 = np.array([1.0, 0.0, 0.0])
    P, V, c = build_alignment(e1, e1, kappa=1.0)
    assert np.allclose(P, np.eye(3), atol=1e-12)
    assert np.allclose(V, np.eye(3), atol=1e-12)
    assert np.allclose(c, e1, atol=1e-12)


def test_alignment_tilted_case():
    # oracle: assemble the projector formula directly and check the identities
    v = np.array([1.0, 0.0])
    v_star = np.array([1.0, 1.0])  # rescaled inside to pairing one
    P, V, c = build_alignment(v, v_star, kappa=1.0)
    vs = v_star / (v_star @ v)
    expected = np.outer(v, v) / (vs @ v) + (np.eye(2) - np.outer(vs, vs) / (vs @ vs))
    assert np.allclose(P, expected, atol=1e-12)
    assert np.linalg.norm(P @ vs - v) <= 1e-12
    assert np.linalg.norm(V @ V.T - P) <= 1e-12


def test_alignment_positive_definite():
    rng = np.random.default_rng(0)
    v = rng.standard_normal(4)
    v_star = v + 0.3 * rng.standard_normal(4)
    if v_star @ v < 0:
        v_star = -v_star
    P, V, c = build_alignment(v, v_star)
    for _ in range(100):
        x = rng.standard_normal(4)
        x /= np.linalg.norm(x)
        assert x @ P @ x > 0


def test_alignment_rejects_orthogonal_pairing():
    with pytest.raises(NonPositivePairing):
        build_alignment(np.array([1.0, 0.0]), np.array([0.0, 1.0]))


def test_alignment_fixes_mean_eigenvectors():
    # after the change of basis, the mean's left and right leading
    # eigenvectors coincide with the returned center
    mean = (MIXED_SIGN_PAIR[0] + MIXED_SIGN_PAIR[1]) / 2.0
    pd = leading_eigenpair(mean)
    pdt = leading_eigenpair(mean.T)
    v, vs = pd.right_vector, pdt.right_vector
    if vs @ v < 0:
        vs = -vs
    P, V, c = build_alignment(v, vs)
    M = np.linalg.solve(V, mean @ V)
    lam = pd.eigenvalue
    assert np.linalg.norm(M @ c - lam * c) <= 1e-9
    assert np.linalg.norm(M.T @ c - lam * c) <= 1e-9


def test_completion_of_first_axis():
    C = orthonormal_completion(np.array([1.0, 0.0, 0.0]))
    assert np.allclose(C[:, 0], [1.0, 0.0, 0.0])
    assert np.allclose(C.T @ C, np.eye(3), atol=1e-12)


def test_completion_of_diagonal_vector():
    c = np.ones(3) / np.sqrt(3)
    C = orthonormal_completion(c)
    assert np.allclose(C.T @ C, np.eye(3), atol=1e-12)
    assert np.allclose(C[:, 0], c)


def test_completion_is_deterministic():
    rng = np.random.default_rng(3)
    c = rng.standard_normal(5)
    c /= np.linalg.norm(c)
    C1 = orthonormal_completion(c)
    C2 = orthonormal_completion(c.copy())
    assert np.array_equal(C1, C2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 7))
def test_completion_properties(seed, d):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(d)
    c /= np.linalg.norm(c)
    C = orthonormal_completion(c)
    assert np.allclose(C.T @ C, np.eye(d), atol=1e-12)
    assert np.allclose(C[:, 0], c, atol=1e-12)
