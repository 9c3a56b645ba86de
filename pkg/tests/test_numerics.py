"""Linear-algebra substrate: eigendecomposition, expm, pseudo-inverse, kron."""

import numpy as np
import pytest

from qmetro.errors import DomainError
from qmetro.numerics import (
    PAULI_X,
    PAULI_Z,
    dag,
    hermitian_eig,
    kron,
    matrix_exp,
    pseudo_inverse,
    unvec,
    vec,
)
from qmetro.states import random_hermitian


class TestHermitianEig:
    def test_identity(self):
        eig = hermitian_eig(np.eye(4))
        assert np.allclose(eig.eigenvalues, np.ones(4))

    def test_pauli_z_ascending(self):
        eig = hermitian_eig(PAULI_Z)
        assert np.allclose(eig.eigenvalues, [-1.0, 1.0])

    def test_reconstruction_random(self):
        m = random_hermitian(8, 42, scale=3.0)
        eig = hermitian_eig(m)
        rebuilt = (eig.eigenvectors * eig.eigenvalues) @ dag(eig.eigenvectors)
        assert np.linalg.norm(rebuilt - m) < 1e-9 * np.linalg.norm(m)

    @pytest.mark.parametrize("dim", [2, 5, 16, 32])
    def test_unitarity_and_reconstruction_up_to_32(self, dim):
        m = random_hermitian(dim, dim, scale=2.0)
        eig = hermitian_eig(m)
        gram = dag(eig.eigenvectors) @ eig.eigenvectors
        assert np.linalg.norm(gram - np.eye(dim)) < 1e-10
        rebuilt = (eig.eigenvectors * eig.eigenvalues) @ dag(eig.eigenvectors)
        assert np.linalg.norm(rebuilt - m) <= 1e-9 * max(np.linalg.norm(m), 1.0)

    def test_rejects_non_square(self):
        with pytest.raises(DomainError):
            hermitian_eig(np.ones((2, 3)))

    def test_rejects_non_hermitian(self):
        with pytest.raises(DomainError):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_nan(self):
        with pytest.raises(DomainError):
            hermitian_eig(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestMatrixExp:
    def test_zero_gives_identity(self):
        assert np.allclose(matrix_exp(np.zeros((3, 3))), np.eye(3))

    def test_nilpotent_truncates(self):
        n = np.array([[0.0, 2.5], [0.0, 0.0]])
        assert np.allclose(matrix_exp(n), np.eye(2) + n)

    def test_pauli_rotation_vs_taylor(self):
        m = -1j * (np.pi / 2) * PAULI_X
        taylor = np.zeros((2, 2), dtype=complex)
        term = np.eye(2, dtype=complex)
        for k in range(30):
            taylor += term
            term = term @ m / (k + 1)
        assert np.max(np.abs(matrix_exp(m) - taylor)) < 1e-12

    def test_inverse_pairs(self):
        for seed in range(4):
            rng = np.random.default_rng(seed)
            m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            m *= 5.0 / max(np.linalg.norm(m), 1e-12)
            prod = matrix_exp(m) @ matrix_exp(-m)
            assert np.linalg.norm(prod - np.eye(4)) < 1e-9

    def test_rejects_non_square(self):
        with pytest.raises(DomainError):
            matrix_exp(np.ones((2, 3)))


class TestPseudoInverse:
    def test_diagonal(self):
        res = pseudo_inverse(np.diag([4.0, 1.0]))
        assert np.allclose(res.matrix, np.diag([0.25, 1.0]))
        assert res.rank == 2

    def test_singular_direction_dropped(self):
        res = pseudo_inverse(np.diag([1.0, 0.0]), tol=1e-12)
        assert np.allclose(res.matrix, np.diag([1.0, 0.0]))
        assert res.rank == 1

    def test_multiply_back_spd(self):
        rng = np.random.default_rng(5)
        g = rng.standard_normal((5, 5))
        m = g @ g.T + 5.0 * np.eye(5)
        res = pseudo_inverse(m)
        assert np.linalg.norm(m @ res.matrix - np.eye(5)) < 1e-9

    def test_moore_penrose_idempotence(self):
        rng = np.random.default_rng(7)
        g = rng.standard_normal((5, 3))
        m = g @ g.T  # rank 3 PSD
        res = pseudo_inverse(m)
        assert res.rank == 3
        assert np.linalg.norm(m @ res.matrix @ m - m) < 1e-9


class TestKron:
    def test_identity(self):
        assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_diagonal_expansion(self):
        assert np.allclose(kron(PAULI_Z, np.eye(2)), np.diag([1.0, 1.0, -1.0, -1.0]))

    def test_mixed_product_identity(self):
        rng = np.random.default_rng(3)
        a, b, c, d = (
            rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(4)
        )
        lhs = kron(a, b) @ kron(c, d)
        rhs = kron(a @ c, b @ d)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestVec:
    def test_row_major_convention(self):
        a = np.arange(4.0).reshape(2, 2)
        assert np.allclose(vec(a), [0.0, 1.0, 2.0, 3.0])
        assert np.allclose(unvec(vec(a)), a)
