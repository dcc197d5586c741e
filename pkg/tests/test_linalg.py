import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from wernerent.linalg import (
    dumps_matrix,
    haar_unitary,
    hermitian_eig,
    kron,
    loads_matrix,
    matrix_from_dict,
    partial_trace_b,
    svd,
)
from wernerent.states import werner_matrix

X = np.array([[0, 1], [1, 0]])


class TestKron:
    def test_identity(self):
        assert_allclose(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_projectors(self):
        p = np.diag([1, 0])
        assert_allclose(kron(p, p), np.diag([1, 0, 0, 0]))

    def test_flip_on_basis(self):
        ket00 = np.array([1, 0, 0, 0])
        assert_allclose(kron(X, X) @ ket00, [0, 0, 0, 1])

    @given(st.lists(st.integers(-5, 5), min_size=12, max_size=12))
    def test_associative_integer_entries(self, vals):
        a = np.array(vals[:4]).reshape(2, 2)
        b = np.array(vals[4:8]).reshape(2, 2)
        c = np.array(vals[8:]).reshape(2, 2)
        assert np.array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            kron(np.array([[np.nan]]), np.eye(2))


class TestPartialTrace:
    def test_product_state(self):
        rho = np.zeros((4, 4))
        rho[0, 0] = 1
        assert_allclose(partial_trace_b(rho, 2), np.diag([1, 0]))

    def test_bell_state(self):
        v = np.array([1, 0, 0, 1]) / np.sqrt(2)
        assert_allclose(partial_trace_b(np.outer(v, v), 2), np.eye(2) / 2, atol=1e-15)

    def test_singlet_werner_by_direct_sum(self):
        rho = werner_matrix(2, -1.0)
        expected = np.zeros((2, 2), dtype=complex)
        for i in range(2):
            for k in range(2):
                expected[i, k] = sum(rho[i * 2 + j, k * 2 + j] for j in range(2))
        assert_allclose(partial_trace_b(rho, 2), expected, atol=1e-15)
        assert_allclose(expected, np.eye(2) / 2, atol=1e-15)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_kron_factorizes(self, d, rng):
        for _ in range(5):
            a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            b = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            assert_allclose(partial_trace_b(kron(a, b), d), a * np.trace(b), atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            partial_trace_b(np.eye(4), 3)


class TestEig:
    def test_diag(self):
        assert_allclose(hermitian_eig(np.diag([2.0, 1.0])).eigenvalues, [1, 2])

    def test_pauli_x(self):
        assert_allclose(hermitian_eig(X).eigenvalues, [-1, 1])

    def test_werner_spectrum(self):
        d, f = 3, -0.5
        res = hermitian_eig(werner_matrix(d, f))
        expected = np.sort([(1 - f) / (d * (d - 1))] * 3 + [(1 + f) / (d * (d + 1))] * 6)
        assert_allclose(res.eigenvalues, expected, atol=1e-12)

    def test_reconstruction(self, rng):
        g = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        h = g + g.conj().T
        w, v = hermitian_eig(h)
        assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - h) < 1e-10
        assert np.linalg.norm(v.conj().T @ v - np.eye(6)) < 1e-10

    def test_rejects_nonhermitian(self):
        with pytest.raises(ValueError):
            hermitian_eig(np.array([[0, 1], [0, 0]]))


class TestSvd:
    def test_maximally_entangled(self):
        d = 3
        assert_allclose(svd(np.eye(d) / np.sqrt(d)).singular_values, [1 / np.sqrt(d)] * d)

    def test_rank_one(self):
        s = svd(np.outer([1, 2, 3], [1j, 0, 1])).singular_values
        assert s[0] > 1 and np.all(s[1:] < 1e-12)

    def test_optimal_state_singular_values(self):
        f = -0.6
        root = np.sqrt(1 - f * f)
        phi = np.zeros((3, 3))
        phi[0, 1] = np.sqrt((1 - root) / 2)
        phi[1, 0] = -np.sqrt((1 + root) / 2)
        s = svd(phi).singular_values
        assert_allclose(s[:2], [np.sqrt((1 + 0.8) / 2), np.sqrt((1 - 0.8) / 2)], atol=1e-15)

    def test_reconstruction_and_orthonormality(self, rng):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        u, s, v = svd(m)
        assert np.all(np.diff(s) <= 0)
        assert np.linalg.norm(u @ np.diag(s) @ v.conj().T - m) < 1e-10
        assert np.linalg.norm(u.conj().T @ u - np.eye(4)) < 1e-10
        assert np.linalg.norm(v.conj().T @ v - np.eye(4)) < 1e-10


class TestHaar:
    def test_scalar(self):
        u = haar_unitary(1, 3)
        assert u.shape == (1, 1) and abs(abs(u[0, 0]) - 1) < 1e-12

    @pytest.mark.parametrize("seed", [0, 1, 12345])
    def test_unitary(self, seed):
        u = haar_unitary(4, seed)
        assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-12

    def test_deterministic(self):
        assert np.array_equal(haar_unitary(4, 99), haar_unitary(4, 99))

    def test_first_moment(self):
        gen = np.random.default_rng(7)
        d, n = 3, 10_000
        u11 = np.array([haar_unitary(d, gen)[0, 0] for _ in range(n)])
        # Re and Im of a Haar matrix entry each have variance 1/(2d)
        se = np.sqrt(1 / (2 * d) / n)
        assert abs(u11.real.mean()) < 5 * se
        assert abs(u11.imag.mean()) < 5 * se
        assert abs(np.mean(np.abs(u11) ** 2) - 1 / d) < 0.01


class TestMatrixJson:
    def test_round_trip(self, rng):
        m = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        assert np.array_equal(loads_matrix(dumps_matrix(m)), m)

    def test_row_major(self):
        m = matrix_from_dict({"rows": 2, "cols": 2, "re": [1, 2, 3, 4], "im": [0, 0, 0, 1]})
        assert m[0, 1] == 2 and m[1, 1] == 4 + 1j

    def test_bad_length(self):
        with pytest.raises(ValueError):
            matrix_from_dict({"rows": 2, "cols": 2, "re": [1, 2, 3], "im": [0, 0, 0]})
