"""POVMs, CFIM, SLD-eigenbasis measurements, optimal projective constructions."""

import numpy as np
import pytest

from conftest import random_povm, unitary_mixed_family
from qmetro.errors import DomainError
from qmetro.families import qubit_theta_phi_derivatives, qubit_theta_phi_family
from qmetro.measurement import (
    Povm,
    cfim,
    cfim_from_probabilities,
    optimal_pure_projectors,
    optimality_conditions,
    sld_measurement,
)
from qmetro.numerics import matrix_exp
from qmetro.qfim_core import qfim_general, qfim_pure, sld_compute
from qmetro.scenarios import dephasing_family
from qmetro.states import ParamFamily, random_hermitian, spectral_decompose, state_derivatives


class TestPovm:
    def test_valid(self):
        povm = Povm(tuple(random_povm(3, 4, 1)))
        assert povm.dim == 3

    def test_rejects_incomplete(self):
        with pytest.raises(DomainError):
            Povm((np.diag([1.0, 0.0]),))

    def test_rejects_negative_element(self):
        with pytest.raises(DomainError):
            Povm((np.diag([1.5, 1.0]), np.diag([-0.5, 0.0])))


class TestCfim:
    def test_trivial_povm_zero(self):
        fam = dephasing_family(1.0, 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]]))
        povm = Povm((np.eye(2, dtype=complex),))
        res = cfim(fam, [1.0, 0.1], povm)
        assert np.max(np.abs(res.matrix)) == 0.0

    def test_bernoulli_closed_form(self):
        """Computational-basis measurement of diag(p(x), 1-p(x))."""

        def evaluate(x):
            p = 0.2 + 0.5 * np.sin(x[0]) ** 2
            return np.diag([p, 1 - p]).astype(complex)

        fam = ParamFamily(n_params=1, evaluate=evaluate)
        x = np.array([0.8])
        p = 0.2 + 0.5 * np.sin(x[0]) ** 2
        dp = 0.5 * np.sin(2 * x[0])
        povm = Povm((np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)))
        res = cfim(fam, x, povm)
        assert res.matrix[0, 0] == pytest.approx(dp**2 / (p * (1 - p)), abs=1e-6)

    @pytest.mark.parametrize("seed", range(6))
    def test_loewner_below_qfim(self, seed):
        fam, _, _ = unitary_mixed_family(2, 500 + seed)
        x = np.array([0.4, -0.3])
        spec = spectral_decompose(fam.density(x))
        drho = state_derivatives(fam, x)
        f = qfim_general(spec, drho)
        povm = Povm(random_povm(2, 4, 600 + seed))
        res = cfim(fam, x, povm)
        gap = np.linalg.eigvalsh(f.matrix - res.matrix)
        assert gap[0] >= -1e-7

    def test_zero_probability_convention(self):
        res = cfim_from_probabilities([0.0, 1.0], [[0.0, 0.0]])
        assert res.matrix[0, 0] == 0.0
        assert res.singular_outcomes == ()
        res = cfim_from_probabilities([0.0, 1.0], [[0.5, -0.5]])
        assert res.singular_outcomes == (0,)


class TestSldMeasurement:
    def test_dephasing_b_parameter(self):
        """Frozen SLD-eigenbasis CFI equals F_BB from the closed form."""
        fam = dephasing_family(1.0, 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]]))
        x = np.array([1.0, 0.1])
        rho = fam.density(x)
        spec = spectral_decompose(rho)
        drho = state_derivatives(fam, x)
        slds = sld_compute(spec, drho)
        _, frozen = sld_measurement(slds.operators[0], rho)
        assert frozen == pytest.approx(4.0 * np.exp(-0.2), abs=1e-7)

    def test_zero_sld(self):
        rho = np.eye(2) / 2
        _, frozen = sld_measurement(np.zeros((2, 2)), rho)
        assert frozen == 0.0

    @pytest.mark.parametrize("seed", range(8))
    def test_frozen_cfi_equals_qfi(self, seed):
        fam, _, _ = unitary_mixed_family(2, 700 + seed)
        x = np.array([0.5, -0.1])
        rho = fam.density(x)
        spec = spectral_decompose(rho)
        drho = state_derivatives(fam, x)
        slds = sld_compute(spec, drho)
        f = qfim_general(spec, drho)
        for a in range(2):
            _, frozen = sld_measurement(slds.operators[a], rho)
            assert abs(frozen - f.matrix[a, a]) < 1e-7


class TestOptimalPureProjectors:
    def test_qubit_basis(self):
        povm = optimal_pure_projectors(np.array([1.0, 0.0]), [np.array([0.0, 1.0])])
        assert np.allclose(povm.elements[0], np.diag([1.0, 0.0]))
        assert np.allclose(povm.elements[1], np.diag([0.0, 1.0]))

    def test_completeness(self):
        rng = np.random.default_rng(9)
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        psi = v / np.linalg.norm(v)
        povm = optimal_pure_projectors(psi, np.eye(4))
        total = sum(povm.elements)
        assert np.max(np.abs(total - np.eye(4))) < 1e-10

    def test_near_true_value_limit(self):
        """CFI of the Humphreys POVM approaches the QFI as the offset shrinks."""
        g = random_hermitian(3, 800, scale=2.0)
        rng = np.random.default_rng(801)
        v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        psi0 = v / np.linalg.norm(v)

        def psi_of(th):
            return matrix_exp(-1j * th * g) @ psi0

        def rho_of(x):
            p = psi_of(x[0])
            return np.outer(p, p.conj())

        def drho(x):
            r = rho_of(x)
            return -1j * (g @ r - r @ g)

        fam = ParamFamily(n_params=1, evaluate=rho_of, analytic_derivatives=[drho])
        th_true = 0.37
        qfi = qfim_pure(psi_of(th_true), [-1j * g @ psi_of(th_true)])[0].matrix[0, 0]
        for offset in (1e-4, 5e-5):
            povm = optimal_pure_projectors(psi_of(th_true - offset), np.eye(3))
            val = cfim(fam, [th_true], povm).matrix[0, 0]
            assert abs(val - qfi) < 1e-5

    def test_non_spanning_seed_rejected(self):
        with pytest.raises(DomainError):
            optimal_pure_projectors(np.array([1.0, 0.0, 0.0]), [np.array([0.0, 1.0, 0.0])])


class TestOptimalityConditions:
    def test_real_family_all_conditions_hold(self):
        th = 0.6
        psi = np.array([np.cos(th), np.sin(th)], dtype=complex)
        dpsi = [np.array([-np.sin(th), np.cos(th)], dtype=complex)]
        povm = optimal_pure_projectors(psi, np.eye(2))
        report = optimality_conditions(psi, dpsi, povm)
        assert report.optimal

    def test_theta_phi_violation_matches_curvature(self):
        """Nonzero Berry curvature shows up as an A-set violation."""
        x = np.array([0.6, 0.4])
        psi = qubit_theta_phi_family().evaluate(x)
        dpsi = qubit_theta_phi_derivatives(x)
        povm = optimal_pure_projectors(psi, np.eye(2))
        report = optimality_conditions(psi, dpsi, povm)
        assert not report.optimal
        assert report.max_violation_a == pytest.approx(np.sin(x[0]) * np.cos(x[0]), abs=1e-10)

    def test_verdict_true_implies_cfim_reaches_qfim(self):
        """Commuting two-parameter family: optimal verdict and CFIM = QFIM."""
        g1 = np.diag([1.0, -1.0, 0.3]).astype(complex)
        g2 = np.diag([0.2, 0.7, -0.5]).astype(complex)
        rng = np.random.default_rng(11)
        v = rng.standard_normal(3)  # real probe keeps every overlap real
        psi0 = (v / np.linalg.norm(v)).astype(complex)

        def psi_of(x):
            return matrix_exp(-1j * (x[0] * g1 + x[1] * g2)) @ psi0

        x = np.array([0.0, 0.0])  # at x = 0 the state is real-amplitude
        psi = psi_of(x)
        dpsi = [-1j * g1 @ psi, -1j * g2 @ psi]

        def rho_of(y):
            p = psi_of(y)
            return np.outer(p, p.conj())

        fam = ParamFamily(
            n_params=2,
            evaluate=rho_of,
            analytic_derivatives=[
                lambda y: -1j * (g1 @ rho_of(y) - rho_of(y) @ g1),
                lambda y: -1j * (g2 @ rho_of(y) - rho_of(y) @ g2),
            ],
        )
        povm = optimal_pure_projectors(psi, np.eye(3))
        report = optimality_conditions(psi, dpsi, povm)
        assert report.optimal
        offset = 1e-4
        povm_hat = optimal_pure_projectors(psi_of([offset, -offset]), np.eye(3))
        f, _ = qfim_pure(psi, dpsi)
        i = cfim(fam, x, povm_hat).matrix
        assert np.max(np.abs(i - f.matrix)) < 1e-6


class TestTheorem13Branch:
    def test_all_overlapping_projectors_optimal_for_real_family(self):
        """A basis with no state-orthogonal member can still be optimal.

        For the real-amplitude family (cos t, sin t) the sigma_x eigenbasis
        has both overlaps nonzero; the B-set condition holds, and its CFI
        reaches the QFI (= 4) identically in t.
        """
        th = 0.4
        psi = np.array([np.cos(th), np.sin(th)], dtype=complex)
        dpsi = [np.array([-np.sin(th), np.cos(th)], dtype=complex)]
        plus = np.array([1.0, 1.0]) / np.sqrt(2)
        minus = np.array([1.0, -1.0]) / np.sqrt(2)
        povm = Povm((np.outer(plus, plus), np.outer(minus, minus)))
        report = optimality_conditions(psi, dpsi, povm)
        assert report.set_a == ()
        assert report.optimal

        fam = ParamFamily(
            n_params=1,
            evaluate=lambda x: np.outer(
                np.array([np.cos(x[0]), np.sin(x[0])]),
                np.array([np.cos(x[0]), np.sin(x[0])]),
            ).astype(complex),
        )
        val = cfim(fam, [th], povm).matrix[0, 0]
        assert val == pytest.approx(4.0, abs=1e-6)

    def test_violated_verdict_comes_with_cfim_gap(self):
        """Verdict false on the (theta, phi) family: the CFIM stays below the QFIM."""
        x = np.array([0.6, 0.4])
        psi = qubit_theta_phi_family().evaluate(x)
        dpsi = qubit_theta_phi_derivatives(x)
        povm = optimal_pure_projectors(psi, np.eye(2))
        report = optimality_conditions(psi, dpsi, povm)
        assert not report.optimal
        fam = qubit_theta_phi_family()
        offset_povm = optimal_pure_projectors(
            qubit_theta_phi_family().evaluate(x - 1e-4), np.eye(2)
        )
        f, _ = qfim_pure(psi, dpsi)
        i = cfim(fam, x, offset_povm).matrix
        assert f.matrix[1, 1] - i[1, 1] > 0.1
