"""Built-in parameterized families for the command-line front end.

Each entry declares its sweepable parameters (CLI flags / config keys), its
fixed settings, and a compute function returning a plain dict of results for
one parameter point.  Everything is numpy-serializable so reports stay
deterministic.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .gaussian import (
    GaussianState,
    coherent_state,
    gaussian_qfim,
    squeezed_vacuum_state,
    thermal_gaussian_state,
    williamson,
)
from .numerics import PAULI_Z
from .qfim_core import crb_report, qfim_general, qfim_pure, sld_compute, attainability_check
from .scenarios import dephasing_family, scenario_ecs, scenario_noon, spin_field_generators
from .states import ParamFamily, random_hermitian, spectral_decompose, state_derivatives
from .unitary import qfim_unitary
from .geometry_thermo import thermal_density, thermal_qfi


def qubit_theta_phi_family() -> ParamFamily:
    """Pure qubit family cos(theta)|0> + sin(theta) e^(i phi)|1>."""

    def evaluate(x):
        theta, phi = x
        return np.array([np.cos(theta), np.sin(theta) * np.exp(1j * phi)])

    return ParamFamily(n_params=2, evaluate=evaluate)


def qubit_theta_phi_derivatives(x):
    theta, phi = x
    dtheta = np.array([-np.sin(theta), np.cos(theta) * np.exp(1j * phi)])
    dphi = np.array([0.0, 1j * np.sin(theta) * np.exp(1j * phi)])
    return [dtheta, dphi]


def _qfim_payload(f, n: int = 1) -> dict:
    report = crb_report(f, n=n)
    return {
        "qfim": f.matrix,
        "trace_f_inverse": report.trace_inverse,
        "diagonal_bound_sum": report.diagonal_bound_sum,
        "effective_fisher": report.effective_fisher,
        "singular": report.singular,
    }


def _compute_qubit_theta_phi(params, fixed):
    x = np.array([params["theta"], params["phi"]])
    family = qubit_theta_phi_family()
    psi = family.evaluate(x)
    f, _ = qfim_pure(psi, qubit_theta_phi_derivatives(x))
    return _qfim_payload(f)


def _compute_dephasing(params, fixed):
    family = dephasing_family(fixed["t"], 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]]))
    x = np.array([params["B"], params["gamma"]])
    spectral = spectral_decompose(family.density(x))
    f = qfim_general(spectral, state_derivatives(family, x))
    return _qfim_payload(f)


def _compute_thermal(params, fixed):
    if fixed["hamiltonian"] == "qubit":
        h = 0.5 * fixed["omega"] * PAULI_Z
    elif fixed["hamiltonian"] == "random":
        h = random_hermitian(int(fixed["dim"]), int(fixed["seed"]), scale=float(fixed["omega"]))
    else:
        raise ConfigError([f"params.hamiltonian: unknown preset {fixed['hamiltonian']!r}"])
    value, _ = thermal_qfi(h, params["T"])
    rho = thermal_density(h, params["T"])
    mean = float(np.real(np.trace(rho @ h)))
    mean2 = float(np.real(np.trace(rho @ h @ h)))
    heat = (mean2 - mean**2) / params["T"] ** 2
    return {
        "qfim": np.array([[value]]),
        "thermal_qfi": value,
        "specific_heat": heat,
        "cv_over_t2": heat / params["T"] ** 2,
    }


def _compute_spin_field(params, fixed):
    r = np.asarray(fixed["r_in"], dtype=float)
    gens, _, _ = spin_field_generators(params["B"], params["theta"], fixed["t"])
    sigma = [
        np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
        np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
        np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    ]
    rho0 = 0.5 * (np.eye(2, dtype=complex) + sum(r[i] * sigma[i] for i in range(3)))
    f = qfim_unitary(spectral_decompose(rho0), gens)
    return _qfim_payload(f)


def _compute_noon(params, fixed):
    res = scenario_noon(int(fixed["d"]), int(fixed["N"]), params["c1"])
    return {
        "qfim": res.computed,
        "closed_form": res.closed_form,
        "max_deviation": res.max_deviation,
        **res.bounds,
    }


def _compute_ecs(params, fixed):
    res = scenario_ecs(int(fixed["d"]), complex(fixed["alpha"]), params["c1"])
    return {
        "qfim": res.computed,
        "closed_form": res.closed_form,
        "max_deviation": res.max_deviation,
        **res.bounds,
    }


GAUSSIAN_PRESETS = {
    "coherent-displacement": {
        "params": ("x",),
        "fixed": {},
    },
    "coherent-phase": {
        "params": ("phi",),
        "fixed": {"alpha_abs": 1.0},
    },
    "squeezed-vacuum-r": {
        "params": ("r",),
        "fixed": {},
    },
    "thermal-nbar": {
        "params": ("nbar",),
        "fixed": {},
    },
}


def gaussian_preset_moments(preset: str, params: dict, fixed: dict):
    """State plus moment derivatives for a one-parameter Gaussian preset."""
    if preset == "coherent-displacement":
        state = GaussianState(np.array([params["x"], 0.0]), 0.5 * np.eye(2))
        return state, [np.array([1.0, 0.0])], [np.zeros((2, 2))]
    if preset == "coherent-phase":
        a = fixed["alpha_abs"] * np.exp(1j * params["phi"])
        state = coherent_state(a)
        dd = np.sqrt(2.0) * fixed["alpha_abs"] * np.array(
            [-np.sin(params["phi"]), np.cos(params["phi"])]
        )
        return state, [dd], [np.zeros((2, 2))]
    if preset == "squeezed-vacuum-r":
        r = params["r"]
        state = squeezed_vacuum_state(r)
        dc = 0.5 * np.diag([2.0 * np.exp(2 * r), -2.0 * np.exp(-2 * r)])
        return state, [np.zeros(2)], [dc]
    if preset == "thermal-nbar":
        state = thermal_gaussian_state(params["nbar"])
        return state, [np.zeros(2)], [np.eye(2)]
    raise ConfigError([f"gaussian preset {preset!r} is unknown"])


def _compute_gaussian(preset):
    def compute(params, fixed):
        state, dd, dc = gaussian_preset_moments(preset, params, fixed)
        f = gaussian_qfim(state, dd, dc)
        decomp = williamson(state.covariance)
        return {
            "qfim": f.matrix,
            "symplectic_eigenvalues": decomp.symplectic_eigenvalues,
        }

    return compute


FAMILIES = {
    "qubit-theta-phi": {
        "params": ("theta", "phi"),
        "fixed": {},
        "compute": _compute_qubit_theta_phi,
    },
    "dephasing-qubit": {
        "params": ("B", "gamma"),
        "fixed": {"t": 1.0},
        "compute": _compute_dephasing,
    },
    "thermal": {
        "params": ("T",),
        "fixed": {"hamiltonian": "qubit", "omega": 1.0, "dim": 4, "seed": 0},
        "compute": _compute_thermal,
    },
    "spin-field": {
        "params": ("B", "theta"),
        "fixed": {"t": 1.0, "r_in": (0.0, 1.0, 0.0)},
        "compute": _compute_spin_field,
    },
    "noon": {
        "params": ("c1",),
        "fixed": {"d": 2, "N": 2},
        "compute": _compute_noon,
    },
    "ecs": {
        "params": ("c1",),
        "fixed": {"d": 2, "alpha": 2.0},
        "compute": _compute_ecs,
    },
}

for _name, _spec in GAUSSIAN_PRESETS.items():
    FAMILIES[f"gaussian-{_name}"] = {
        "params": _spec["params"],
        "fixed": dict(_spec["fixed"]),
        "compute": _compute_gaussian(_name),
    }


def attainability_payload(family: ParamFamily, x, tol: float = 1e-8) -> dict:
    """SLD-based attainability data for a mixed/pure family point."""
    rho = family.density(x)
    spectral = spectral_decompose(rho)
    drho = state_derivatives(family, x)
    slds = sld_compute(spectral, drho)
    report = attainability_check(rho, slds, tol=tol)
    return {
        "attainable": report.attainable,
        "weak_commutation_matrix": report.t_matrix,
    }
