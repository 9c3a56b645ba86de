"""State-space geometry and thermal/dynamical Fisher information.

Fidelity and Bures distance, the contractive Riemannian metric family, the
quantum geometric tensor with Berry curvature, thermal-state QFI by two
routes, the Fisher-information flow under Lindblad noise, a non-Markovianity
measure, and the speed-limit bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MethodUnsupportedError, NumericalFailureError
from .numerics import as_complex_matrix, dag, frobenius_norm, hermitian_part
from .qfim_core import QfimMatrix, qfim_general
from .states import ParamFamily, SpectralData, as_density, spectral_decompose, state_derivatives

MC_FUNCTIONS = {
    "sld": lambda x: (1.0 + x) / 2.0,
    "rld": lambda x: x,
    "lld": lambda x: np.ones_like(x),
    "wigner_yanase": lambda x: 0.25 * (np.sqrt(x) + 1.0) ** 2,
}


@dataclass(frozen=True)
class FidelityResult:
    value: float
    bures_distance: float
    bures_angle: float


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(hermitian_part(m))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ dag(v)


def fidelity(rho1, rho2) -> FidelityResult:
    """Uhlmann fidelity ``Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))`` via spectral roots.

    Also reports the Bures distance ``sqrt(2 - 2f)`` and the Bures angle
    ``arccos f`` (the speed-limit convention); the two are exposed separately
    to keep the conventions apart.
    """
    a = as_density(rho1)
    b = as_density(rho2)
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    ra = _psd_sqrt(a)
    w = np.linalg.eigvalsh(hermitian_part(ra @ b @ ra))
    # Rounding puts eigenvalue noise at eps * max(w); sqrt would amplify it.
    floor = max(float(w[-1]), 0.0) * w.size * np.finfo(float).eps
    w = np.where(w > floor, w, 0.0)
    f = float(np.sum(np.sqrt(w)))
    f = min(max(f, 0.0), 1.0)
    return FidelityResult(
        value=f,
        bures_distance=float(np.sqrt(max(2.0 - 2.0 * f, 0.0))),
        bures_angle=float(np.arccos(f)),
    )


@dataclass(frozen=True)
class BuresCheck:
    residual: float
    bures_sq: float
    quadratic_form: float
    rank_changed: bool


def bures_qfim_check(family: ParamFamily, x, dx) -> BuresCheck:
    """Residual of ``D_B^2(rho(x), rho(x+dx)) = dx^T F dx / 4``; cubic in |dx|.

    A detected rank change between the two points is flagged rather than
    raised: the quadratic relation is only guaranteed at constant rank.
    """
    x = np.asarray(x, dtype=float)
    dx = np.asarray(dx, dtype=float)
    rho = family.density(x)
    rho_shift = family.density(x + dx)
    spectral = spectral_decompose(rho)
    spectral_shift = spectral_decompose(rho_shift)
    f = qfim_general(spectral, state_derivatives(family, x))
    quad = 0.25 * float(dx @ f.matrix @ dx)
    bures_sq = fidelity(rho, rho_shift).bures_distance ** 2
    return BuresCheck(
        residual=abs(bures_sq - quad),
        bures_sq=bures_sq,
        quadratic_form=quad,
        rank_changed=spectral.rank != spectral_shift.rank,
    )


def riemannian_metric(spectral: SpectralData, drho, h: str = "sld") -> np.ndarray:
    """Contractive Riemannian metric with a named Morozova-Cencov function.

    ``g_uv = (1/4) sum_i [d_u rho]_ii [d_v rho]_ii / w_i
    + (1/2) sum_{i<j} Re([d_u rho]_ij [d_v rho]_ji) / (w_j h(w_i / w_j))``
    in the eigenbasis, with eigenvalues ascending (so ``w_i <= w_j`` feeds
    ``h``).  For ``h = sld`` this equals QFIM/4.
    """
    if h not in MC_FUNCTIONS:
        raise DomainError(f"unknown Morozova-Cencov function {h!r}; choose from {sorted(MC_FUNCTIONS)}")
    if spectral.rank < spectral.dim:
        raise MethodUnsupportedError("riemannian_metric requires a full-rank state")
    hfun = MC_FUNCTIONS[h]
    w, v = spectral.eigenvalues, spectral.eigenvectors
    overlaps = [dag(v) @ as_complex_matrix(d, "drho") @ v for d in drho]
    n = len(overlaps)
    g = np.zeros((n, n))
    d = spectral.dim
    for mu in range(n):
        for nu in range(mu, n):
            val = 0.25 * float(
                np.sum(np.real(np.diagonal(overlaps[mu])) * np.real(np.diagonal(overlaps[nu])) / w)
            )
            for i in range(d):
                for j in range(i + 1, d):
                    weight = w[j] * float(hfun(w[i] / w[j]))
                    val += 0.5 * float(np.real(overlaps[mu][i, j] * overlaps[nu][j, i])) / weight
            g[mu, nu] = g[nu, mu] = val
    return g


@dataclass(frozen=True)
class Qgt:
    """Quantum geometric tensor of a pure family.

    ``Re(Q) = F/4``; ``berry_curvature[u, v] = -2 Im <d_u psi | d_v psi>``;
    ``robertson_slack = det F + 4 det curvature`` (two-parameter case only),
    which is non-negative for any pure family.
    """

    q: np.ndarray
    berry_connection: np.ndarray
    berry_curvature: np.ndarray
    robertson_slack: float | None = None


def qgt(psi, dpsi) -> Qgt:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise DomainError("state vector must be normalized")
    dpsi = [np.asarray(d, dtype=complex).reshape(-1) for d in dpsi]
    n = len(dpsi)
    q = np.zeros((n, n), dtype=complex)
    for mu in range(n):
        for nu in range(n):
            q[mu, nu] = np.vdot(dpsi[mu], dpsi[nu]) - np.vdot(dpsi[mu], psi) * np.vdot(psi, dpsi[nu])
    connection = np.array([float(np.real(1j * np.vdot(psi, d))) for d in dpsi])
    curvature = -2.0 * np.imag(q)
    curvature = (curvature - curvature.T) / 2.0
    slack = None
    if n == 2:
        f = 4.0 * np.real(q)
        slack = float(np.linalg.det(f) + 4.0 * np.linalg.det(curvature))
        if slack < -1e-8:
            raise NumericalFailureError(f"Robertson-type inequality violated: {slack:.3e}")
    return Qgt(q=q, berry_connection=connection, berry_curvature=curvature, robertson_slack=slack)


def thermal_density(h, temperature: float) -> np.ndarray:
    """Gibbs state ``exp(-H/T)/Z`` (k_B = 1), computed stably in the eigenbasis."""
    if temperature <= 0:
        raise DomainError("temperature must be positive")
    hm = as_complex_matrix(h, "hamiltonian")
    w, v = np.linalg.eigh(hermitian_part(hm))
    p = np.exp(-(w - w[0]) / temperature)
    p /= np.sum(p)
    return (v * p) @ dag(v)


def thermal_qfi(h, temperature: float) -> tuple[float, np.ndarray]:
    """Temperature QFI of a Gibbs state and its SLD.

    ``F_TT = var(H)/T^4 = C_v/T^2`` and ``L_T = (H - <H>)/T^2``: since
    ``d rho/dT = (H - <H>) rho / T^2`` commutes with the state, the SLD is the
    centered Hamiltonian over T^2.
    """
    rho = thermal_density(h, temperature)
    hm = hermitian_part(as_complex_matrix(h, "hamiltonian"))
    mean = float(np.real(np.trace(rho @ hm)))
    mean2 = float(np.real(np.trace(rho @ hm @ hm)))
    var = mean2 - mean * mean
    sld = (hm - mean * np.eye(hm.shape[0])) / temperature**2
    return var / temperature**4, sld


def thermal_qfim_spectral_sum(h, generators, temperature: float) -> QfimMatrix:
    """Thermal QFIM of commuting unitary generators from the energy-basis sum.

    ``F_ab = 4 sum_{i<j} (p_i - p_j)^2/(p_i + p_j)
    Re(<E_i|O_a|E_j><E_j|O_b|E_i>)`` with Gibbs weights ``p_i``; equals the
    unitary-process QFIM of ``U = exp(i sum_a x_a O_a)`` at x = 0 with the
    thermal probe.
    """
    if temperature <= 0:
        raise DomainError("temperature must be positive")
    ops = [hermitian_part(as_complex_matrix(o, "generator")) for o in generators]
    for a in range(len(ops)):
        for b in range(a + 1, len(ops)):
            comm = ops[a] @ ops[b] - ops[b] @ ops[a]
            if frobenius_norm(comm) > 1e-10 * max(1.0, frobenius_norm(ops[a]) * frobenius_norm(ops[b])):
                raise DomainError(f"generators {a} and {b} do not commute")
    hm = hermitian_part(as_complex_matrix(h, "hamiltonian"))
    w, v = np.linalg.eigh(hm)
    p = np.exp(-(w - w[0]) / temperature)
    p /= np.sum(p)
    overlaps = [dag(v) @ o @ v for o in ops]
    n = len(ops)
    f = np.zeros((n, n))
    d = w.size
    for a in range(n):
        for b in range(a, n):
            val = 0.0
            for i in range(d):
                for j in range(i + 1, d):
                    num = (p[i] - p[j]) ** 2
                    if num == 0.0:
                        continue
                    val += 4.0 * num / (p[i] + p[j]) * float(
                        np.real(overlaps[a][i, j] * overlaps[b][j, i])
                    )
            f[a, b] = f[b, a] = val
    return QfimMatrix(f)


def qfi_flow(rho, sld, lindblad_ops, rates) -> float:
    """Fisher-information flow ``-sum_j gamma_j Tr(rho [L, G_j]† [L, G_j])``.

    Non-positive whenever every rate is non-negative; positive values signal
    non-Markovian backflow (they require negative instantaneous rates).
    """
    r = as_density(rho)
    l_op = as_complex_matrix(sld, "sld")
    total = 0.0
    for gamma, g in zip(rates, lindblad_ops):
        g = as_complex_matrix(g, "lindblad operator")
        comm = l_op @ g - g @ l_op
        total -= float(gamma) * float(np.real(np.trace(r @ dag(comm) @ comm)))
    return total


def non_markovianity(qfim_trajectory, dt: float) -> float:
    """Positive part of the average-QFIM flow, integrated over time.

    Central differences of the trajectory give ``dF/dt`` at interior grid
    points; the measure sums ``max(lambda_max, 0) * dt`` over them.
    """
    mats = [np.asarray(m, dtype=float) for m in qfim_trajectory]
    if len(mats) < 3:
        raise DomainError("non_markovianity needs at least 3 trajectory points")
    if dt <= 0:
        raise DomainError("dt must be positive")
    total = 0.0
    for k in range(1, len(mats) - 1):
        deriv = (mats[k + 1] - mats[k - 1]) / (2.0 * dt)
        lam = float(np.linalg.eigvalsh((deriv + deriv.T) / 2.0)[-1])
        total += max(lam, 0.0) * dt
    return total


def speed_limit_bound(rho0, rho_t, f_tt: float) -> float:
    """Lower bound ``2 arccos(f) / sqrt(F_tt)`` on the evolution time."""
    if f_tt <= 0:
        raise DomainError("time QFI must be positive")
    angle = fidelity(rho0, rho_t).bures_angle
    return 2.0 * angle / np.sqrt(f_tt)
