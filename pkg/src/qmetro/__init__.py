"""qmetro: quantum Fisher information and multiparameter estimation toolkit.

Quantum Fisher information matrices by five routes, symmetric logarithmic
derivatives, multiparameter Cramer-Rao bounds with attainability diagnostics,
optimal measurements, Gaussian-state estimation, and GRAPE-optimized control
pulses for noisy parameter estimation.
"""

from .errors import ConfigError, DomainError, MethodUnsupportedError, NumericalFailureError
from .qfim_core import (
    QfimMatrix,
    SldSet,
    attainability_check,
    crb_report,
    qfim_bloch,
    qfim_general,
    qfim_pure,
    qfim_qubit_closed_form,
    reparameterize,
    rld_qfim,
    sld_compute,
)
from .states import DensityMatrix, ParamFamily, SpectralData, random_density_matrix, spectral_decompose
from .unitary import GeneratorSet, UnitaryFamily, attainability_pure_unitary, generator_h, qfim_unitary
from .gaussian import GaussianState, WilliamsonDecomp, gaussian_qfim, gaussian_sld, williamson
from .geometry_thermo import (
    fidelity,
    non_markovianity,
    qfi_flow,
    qgt,
    riemannian_metric,
    speed_limit_bound,
    thermal_qfi,
    thermal_qfim_spectral_sum,
)
from .measurement import Povm, cfim, optimal_pure_projectors, optimality_conditions, sld_measurement
from .grape import ControlProblem, GrapeResult, grape_gradients, grape_run, propagate

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ControlProblem",
    "DensityMatrix",
    "DomainError",
    "GaussianState",
    "GeneratorSet",
    "GrapeResult",
    "MethodUnsupportedError",
    "NumericalFailureError",
    "ParamFamily",
    "Povm",
    "QfimMatrix",
    "SldSet",
    "SpectralData",
    "UnitaryFamily",
    "WilliamsonDecomp",
    "attainability_check",
    "attainability_pure_unitary",
    "cfim",
    "crb_report",
    "fidelity",
    "gaussian_qfim",
    "gaussian_sld",
    "generator_h",
    "grape_gradients",
    "grape_run",
    "non_markovianity",
    "optimal_pure_projectors",
    "optimality_conditions",
    "propagate",
    "qfi_flow",
    "qfim_bloch",
    "qfim_general",
    "qfim_pure",
    "qfim_qubit_closed_form",
    "qfim_unitary",
    "qgt",
    "random_density_matrix",
    "reparameterize",
    "riemannian_metric",
    "rld_qfim",
    "sld_compute",
    "sld_measurement",
    "spectral_decompose",
    "speed_limit_bound",
    "thermal_qfi",
    "thermal_qfim_spectral_sum",
    "williamson",
]
