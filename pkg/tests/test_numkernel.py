import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lapflow import numkernel as nk

from oracles import circulant_eigs, expm_taylor, inverse_2x2, two_node_expm

L2 = np.array([[1, -1], [-1, 1]], dtype=complex)


def random_matrix(rng, n, rank=None):
    if rank is None:
        return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    U = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    V = rng.normal(size=(rank, n)) + 1j * rng.normal(size=(rank, n))
    return U @ V


class TestEig:
    def test_two_node_laplacian(self):
        d = nk.eig(L2)
        np.testing.assert_allclose(d.eigenvalues, [0, 2], atol=1e-12)

    def test_complex_weight(self):
        d = nk.eig((1 + 1j) * L2)
        np.testing.assert_allclose(d.eigenvalues, [0, 2 + 2j], atol=1e-12)

    def test_directed_three_cycle(self):
        L = np.array([[1, -1, 0], [0, 1, -1], [-1, 0, 1]])
        d = nk.eig(L)
        expected = circulant_eigs([1, -1, 0])
        expected = expected[np.lexsort((expected.imag, expected.real, np.round(abs(expected), 10)))]
        np.testing.assert_allclose(d.eigenvalues, expected, atol=1e-12)
        np.testing.assert_allclose(d.eigenvalues, [0, 1.5 - 0.8660254j, 1.5 + 0.8660254j], atol=1e-7)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            nk.eig(np.ones((2, 3)))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            nk.eig(np.array([[np.nan, 0], [0, 1]]))

    def test_phase_convention(self):
        d = nk.eig(np.ones((3, 3)))
        x = d.right_vectors[:, -1]
        k = np.argmax(abs(x))
        assert abs(x[k].imag) < 1e-15 and x[k].real > 0

    def test_defective_flagged(self):
        d = nk.eig(np.array([[1.0, 1.0], [0.0, 1.0]]))
        assert d.is_defective

    def test_residuals_and_trace(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = int(rng.integers(1, 21))
            M = random_matrix(rng, n)
            d = nk.eig(M)
            nrm = np.linalg.norm(M, 2)
            X, Z, w = d.right_vectors, d.left_vectors, d.eigenvalues
            assert np.linalg.norm(M @ X - X * w, axis=0).max() <= 1e-8 * nrm
            assert np.linalg.norm(Z.conj().T @ M - w[:, None] * Z.conj().T, axis=1).max() <= 1e-8 * nrm
            np.testing.assert_allclose(np.linalg.norm(X, axis=0), 1, rtol=1e-12)
            assert abs(w.sum() - np.trace(M)) <= 1e-8 * max(1, abs(np.trace(M)), nrm)
            mod = np.round(abs(w) / nrm, 10)
            assert np.all(np.diff(mod) >= 0)


class TestPinv:
    def test_two_node(self):
        np.testing.assert_allclose(nk.pinv(L2), 0.25 * L2, atol=1e-14)

    def test_zero(self):
        np.testing.assert_array_equal(nk.pinv(np.zeros((3, 3))), np.zeros((3, 3)))

    def test_complex_weight(self):
        np.testing.assert_allclose(nk.pinv((1 + 1j) * L2), (0.125 - 0.125j) * L2, atol=1e-14)
        np.testing.assert_allclose(np.linalg.eigvals(nk.pinv((1 + 1j) * L2)).max(), 1 / (2 + 2j), atol=1e-14)

    def test_rank_reported(self):
        res = nk.pinv(L2, return_rank=True)
        assert res.rank == 1

    def test_rectangular(self):
        rng = np.random.default_rng(0)
        M = random_matrix(rng, 4)[:, :3]
        r = nk.penrose_residuals(M, nk.pinv(M))
        assert max(r.values()) < 1e-10

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(1, 12), rank=st.integers(0, 12), seed=st.integers(0, 2**32 - 1))
    def test_penrose_property(self, n, rank, seed):
        rng = np.random.default_rng(seed)
        M = random_matrix(rng, n, min(rank, n)) if rank else np.zeros((n, n))
        r = nk.penrose_residuals(M, nk.pinv(M, rank_tol=1e-10))
        assert max(r.values()) <= 1e-8


class TestExpm:
    def test_zero(self):
        np.testing.assert_array_equal(nk.expm(np.zeros((3, 3))), np.eye(3))

    def test_diagonal(self):
        np.testing.assert_allclose(nk.expm(np.diag([-1.0, -2.0])), np.diag(np.exp([-1.0, -2.0])), rtol=1e-14)

    def test_two_node_closed_form(self):
        E = nk.expm(-L2)
        np.testing.assert_allclose(E, two_node_expm(1, 1), rtol=1e-13)
        np.testing.assert_allclose(E.real, [[0.5677, 0.4323], [0.4323, 0.5677]], atol=5e-5)

    def test_against_taylor_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(1, 9))
            M = random_matrix(rng, n) * rng.uniform(0.1, 3)
            ref = expm_taylor(M)
            assert np.linalg.norm(nk.expm(M) - ref) <= 1e-8 * np.linalg.norm(ref)

    def test_overflow_reported(self):
        with pytest.raises(nk.ExpmOverflow):
            nk.expm(np.array([[1000.0]]))

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), s=st.floats(0.01, 2), t=st.floats(0.01, 2))
    def test_semigroup(self, seed, s, t):
        rng = np.random.default_rng(seed)
        M = random_matrix(rng, int(rng.integers(1, 8)))
        lhs = nk.expm(M * (s + t))
        assert np.linalg.norm(lhs - nk.expm(M * s) @ nk.expm(M * t)) <= 1e-8 * np.linalg.norm(lhs)


class TestSolve:
    def test_identity(self):
        B = np.arange(6).reshape(3, 2)
        np.testing.assert_array_equal(nk.solve(np.eye(3), B), B)

    def test_diagonal(self):
        np.testing.assert_allclose(nk.solve(np.diag([2.0, 4.0]), np.eye(2)), np.diag([0.5, 0.25]))

    def test_shifted_laplacian(self):
        M = L2 + np.ones((2, 2)) / 2
        X, cond = nk.solve(M, np.eye(2), return_cond=True)
        np.testing.assert_allclose(X, inverse_2x2(M), atol=1e-14)
        np.testing.assert_allclose(X, [[0.75, 0.25], [0.25, 0.75]], atol=1e-14)
        assert cond == pytest.approx(2.0)

    def test_singular(self):
        with pytest.raises(nk.SingularMatrixError):
            nk.solve(L2, np.eye(2))

    def test_residual(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            n = int(rng.integers(1, 15))
            M, B = random_matrix(rng, n), random_matrix(rng, n)
            X = nk.solve(M, B)
            assert np.linalg.norm(M @ X - B) <= 1e-10 * np.linalg.norm(M) * np.linalg.norm(X)


def test_positivity_conventions():
    M = np.array([[1 + 1j, 0.5 - 0.1j]])
    assert nk.is_real_positive(M)
    assert not nk.is_nonnegative(M)
    assert nk.is_nonnegative(np.array([[0, 1j]]))


def test_results_are_read_only():
    E = nk.expm(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        E[0, 0] = 5
