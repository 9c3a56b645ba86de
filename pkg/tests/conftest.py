"""Shared fixtures: seeded families, probe states, POVM generators."""

import numpy as np
import pytest

from qmetro.numerics import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, dag, matrix_exp
from qmetro.states import ParamFamily, random_density_matrix, random_hermitian


def unitary_mixed_family(dim, seed, n_params=2, rank=None, t=1.0):
    """Seeded family rho(x) = U(x) rho0 U(x)† with U = exp(-i t sum_a x_a G_a).

    Returns (ParamFamily, probe DensityMatrix, generator list).
    """
    rank = dim if rank is None else rank
    rho0 = random_density_matrix(dim, rank, seed)
    gens = [random_hermitian(dim, 1000 * seed + 7 * a + 3) for a in range(n_params)]

    def evaluate(x):
        h = sum(x[a] * gens[a] for a in range(n_params))
        u = matrix_exp(-1j * t * h)
        return u @ rho0.matrix @ dag(u)

    return ParamFamily(n_params=n_params, evaluate=evaluate), rho0, gens


def pure_unitary_family(dim, seed, n_params=2):
    """Seeded pure family psi(x) = exp(-i sum_a x_a G_a) psi0 with analytic dpsi."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    psi0 = v / np.linalg.norm(v)
    gens = [random_hermitian(dim, 2000 * seed + 11 * a + 5) for a in range(n_params)]

    def psi_of(x):
        h = sum(x[a] * gens[a] for a in range(n_params))
        return matrix_exp(-1j * h) @ psi0

    return psi_of, psi0, gens


def random_povm(dim, n_outcomes, seed):
    """Random informationally-rich POVM from normalized PSD elements."""
    rng = np.random.default_rng(seed)
    mats = [
        rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        for _ in range(n_outcomes)
    ]
    psd = [m @ dag(m) for m in mats]
    total = sum(psd)
    w, v = np.linalg.eigh(total)
    inv_half = (v / np.sqrt(w)) @ dag(v)
    return tuple(inv_half @ p @ inv_half for p in psd)


@pytest.fixture
def theta_phi():
    """The (theta, phi) qubit family: psi, dpsi, closed-form QFIM at a point."""

    def build(theta, phi):
        psi = np.array([np.cos(theta), np.sin(theta) * np.exp(1j * phi)])
        dth = np.array([-np.sin(theta), np.cos(theta) * np.exp(1j * phi)])
        dph = np.array([0.0, 1j * np.sin(theta) * np.exp(1j * phi)])
        closed = np.diag([4.0, np.sin(2 * theta) ** 2])
        return psi, [dth, dph], closed

    return build


PAULIS = {"i": PAULI_I, "x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}
