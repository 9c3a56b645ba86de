"""Closed-form estimation scenarios wired as executable fixtures.

Each scenario computes its QFIM twice: once through the generic machinery
(spectral engine, unitary-process engine, or pure-state engine on truncated
Fock spaces) and once from the published closed form, reporting the maximum
deviation and the associated bound quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .errors import DomainError
from .numerics import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, dag, kron, matrix_exp
from .qfim_core import qfim_general, qfim_pure
from .states import DensityMatrix, ParamFamily, spectral_decompose, state_derivatives
from .unitary import GeneratorSet, UnitaryFamily, generator_h, qfim_unitary

FOCK_CUTOFF_CAP = 200
FOCK_TAIL = 1e-10

_SIGMA = (PAULI_X, PAULI_Y, PAULI_Z)


@dataclass(frozen=True)
class ScenarioResult:
    """Computed-vs-closed-form record for one scenario evaluation."""

    scenario: str
    params: dict
    computed: np.ndarray
    closed_form: np.ndarray
    max_deviation: float
    bounds: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)


def _result(scenario, params, computed, closed, bounds=None, flags=None) -> ScenarioResult:
    computed = np.asarray(computed, dtype=float)
    closed = np.asarray(closed, dtype=float)
    dev = float(np.max(np.abs(computed - closed))) if computed.size else 0.0
    return ScenarioResult(
        scenario=scenario,
        params=dict(params),
        computed=computed,
        closed_form=closed,
        max_deviation=dev,
        bounds=dict(bounds or {}),
        flags=dict(flags or {}),
    )


# ---------------------------------------------------------------------------
# Truncated Fock-space utilities (shared by the optical scenarios and tests).

def destroy(cutoff: int) -> np.ndarray:
    """Annihilation operator on the {|0>, ..., |cutoff>} Fock space."""
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), k=1).astype(complex)


def coherent_fock(alpha: complex, cutoff: int) -> np.ndarray:
    """Coherent-state amplitudes ``exp(-|a|^2/2) a^k / sqrt(k!)``."""
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[0] = 1.0
    for k in range(1, cutoff + 1):
        amps[k] = amps[k - 1] * alpha / np.sqrt(k)
    return amps * np.exp(-0.5 * abs(alpha) ** 2)


def coherent_cutoff(alpha: complex, tail: float = FOCK_TAIL) -> int:
    """Smallest cutoff whose truncated coherent state loses < ``tail`` population."""
    mean = abs(alpha) ** 2
    term = math.exp(-mean)
    total = term
    k = 0
    while 1.0 - total > tail:
        k += 1
        if k > FOCK_CUTOFF_CAP:
            raise DomainError(f"|alpha| = {abs(alpha):.3f} needs a Fock cutoff above {FOCK_CUTOFF_CAP}")
        term *= mean / k
        total += term
    return max(k, 2)


def squeezed_vacuum_fock(r: float, cutoff: int) -> np.ndarray:
    """Squeezed vacuum ``exp(r (a†^2 - a^2)/2)|0>`` on a truncated Fock space."""
    a = destroy(cutoff)
    gen = 0.5 * r * (dag(a) @ dag(a) - a @ a)
    psi = np.zeros(cutoff + 1, dtype=complex)
    psi[0] = 1.0
    out = scipy.sparse.linalg.expm_multiply(scipy.sparse.csc_matrix(gen), psi)
    return out / np.linalg.norm(out)


# ---------------------------------------------------------------------------
# Dephasing qubit (amplitude + decay-rate estimation).

def dephasing_state(b: float, gamma: float, t: float, rho0: np.ndarray) -> np.ndarray:
    """Analytic dephasing solution: coherence rotates by 2Bt and decays as e^(-gamma t)."""
    rho0 = np.asarray(rho0, dtype=complex)
    out = rho0.copy()
    out[0, 1] = rho0[0, 1] * np.exp(-2j * b * t - gamma * t)
    out[1, 0] = np.conj(out[0, 1])
    return out


def dephasing_family(t: float, rho0: np.ndarray) -> ParamFamily:
    """(B, gamma) family at fixed evolution time with analytic derivatives."""
    rho0 = np.asarray(rho0, dtype=complex)

    def evaluate(x):
        return dephasing_state(x[0], x[1], t, rho0)

    def _offdiag(x, factor):
        z = factor * rho0[0, 1] * np.exp(-2j * x[0] * t - x[1] * t)
        out = np.zeros((2, 2), dtype=complex)
        out[0, 1] = z
        out[1, 0] = np.conj(z)
        return out

    return ParamFamily(
        n_params=2,
        evaluate=evaluate,
        analytic_derivatives=[
            lambda x: _offdiag(x, -2j * t),
            lambda x: _offdiag(x, -t),
        ],
    )


def scenario_dephasing_qubit(b: float, gamma: float, t: float, rho0=None) -> ScenarioResult:
    """Dephasing-qubit QFIM vs the closed forms for F_BB, F_gg, F_Bg = 0."""
    if t < 0 or gamma < 0:
        raise DomainError("dephasing scenario needs t >= 0 and gamma >= 0")
    if rho0 is None:
        rho0 = 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)
    rho0 = np.asarray(rho0, dtype=complex)
    family = dephasing_family(t, rho0)
    x = np.array([b, gamma])
    spectral = spectral_decompose(family.density(x))
    computed = qfim_general(spectral, state_derivatives(family, x)).matrix

    p00 = float(np.real(rho0[0, 0]))
    p11 = float(np.real(rho0[1, 1]))
    coh2 = abs(rho0[0, 1]) ** 2
    flags = {}
    f_bb = 16.0 * coh2 * np.exp(-2.0 * gamma * t) * t**2
    denom = p00 * p11 * np.exp(2.0 * gamma * t) - coh2
    if coh2 < 1e-14:
        flags["degenerate"] = True
        f_gg = 0.0
    elif denom < 1e-14:
        # Pure probe at gamma = 0: the rank changes and the mixed-state
        # closed form for F_gg is a 0/0; report the computed value instead.
        flags["rank_boundary"] = True
        f_gg = computed[1, 1]
    else:
        f_gg = 4.0 * p00 * p11 * coh2 * t**2 / denom
    closed = np.array([[f_bb, 0.0], [0.0, f_gg]])
    return _result(
        "dephasing-qubit",
        {"B": b, "gamma": gamma, "t": t},
        computed,
        closed,
        bounds=_bound_quantities(computed),
        flags=flags,
    )


def _bound_quantities(f: np.ndarray) -> dict:
    w = np.linalg.eigvalsh((f + f.T) / 2.0)
    singular = w[0] < 1e-12 * max(w[-1], 1.0)
    tr_inv = float(np.sum(1.0 / w[w > 1e-12 * max(w[-1], 1.0)])) if w.size else 0.0
    return {"trace_f_inverse": tr_inv, "singular": bool(singular)}


# ---------------------------------------------------------------------------
# Single spin in a field (amplitude + angle).

def spin_field_generators(b: float, theta: float, t: float):
    """Generator pair for the in-plane field: H_B = t n0.sigma, H_theta = -sin(Bt)/2 n1.sigma.

    Returns the generator set together with the axes n0 and n1.
    """
    n0 = np.array([np.cos(theta), 0.0, np.sin(theta)])
    n1 = np.array(
        [np.cos(b * t) * np.sin(theta), np.sin(b * t), -np.cos(b * t) * np.cos(theta)]
    )
    h_b = t * sum(n0[i] * _SIGMA[i] for i in range(3))
    h_theta = -0.5 * np.sin(b * t) * sum(n1[i] * _SIGMA[i] for i in range(3))
    u = matrix_exp(1j * b * t * sum(n0[i] * _SIGMA[i] for i in range(3)))
    k_ops = tuple(-u @ h @ dag(u) for h in (h_b, h_theta))
    return GeneratorSet(h_ops=(h_b, h_theta), k_ops=k_ops), n0, n1


def scenario_spin_field(b: float, theta: float, t: float, r_in) -> ScenarioResult:
    """Spin-in-field QFIM entries vs the closed forms, pure Bloch probe."""
    r = np.asarray(r_in, dtype=float)
    if abs(np.linalg.norm(r) - 1.0) > 1e-9:
        raise DomainError("spin-field closed forms assume a pure probe (|r| = 1)")
    gens, n0, n1 = spin_field_generators(b, theta, t)
    rho0 = 0.5 * (np.eye(2, dtype=complex) + sum(r[i] * _SIGMA[i] for i in range(3)))
    computed = qfim_unitary(spectral_decompose(rho0), gens).matrix

    s = np.sin(b * t)
    f_tt = s**2 * (1.0 - float(n1 @ r) ** 2)
    f_bb = 4.0 * t**2 * (1.0 - float(n0 @ r) ** 2)
    f_bt = 2.0 * t * s * float(n0 @ r) * float(n1 @ r)
    closed = np.array([[f_bb, f_bt], [f_bt, f_tt]])
    return _result(
        "spin-field",
        {"B": b, "theta": theta, "t": t, "r_in": list(map(float, r))},
        computed,
        closed,
        bounds=_bound_quantities(computed),
    )


# ---------------------------------------------------------------------------
# Two-qubit ancilla-assisted field estimation (B, theta, phi).

def _field_direction(theta: float, phi: float) -> np.ndarray:
    return np.array(
        [np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), np.sin(theta)]
    )


def _field_hamiltonian(x) -> np.ndarray:
    b, theta, phi = x
    n = _field_direction(theta, phi)
    h1 = sum(n[i] * _SIGMA[i] for i in range(3))
    return -b * kron(h1, PAULI_I)


def _field_dhamiltonians():
    def db(x):
        n = _field_direction(x[1], x[2])
        return -kron(sum(n[i] * _SIGMA[i] for i in range(3)), PAULI_I)

    def dtheta(x):
        b, theta, phi = x
        dn = np.array(
            [-np.sin(theta) * np.cos(phi), -np.sin(theta) * np.sin(phi), np.cos(theta)]
        )
        return -b * kron(sum(dn[i] * _SIGMA[i] for i in range(3)), PAULI_I)

    def dphi(x):
        b, theta, phi = x
        dn = np.array([-np.cos(theta) * np.sin(phi), np.cos(theta) * np.cos(phi), 0.0])
        return -b * kron(sum(dn[i] * _SIGMA[i] for i in range(3)), PAULI_I)

    return [db, dtheta, dphi]


def bell_probe() -> np.ndarray:
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1.0 / np.sqrt(2.0)
    return psi


def scenario_two_qubit_ancilla(b: float, theta: float, phi: float, t: float) -> ScenarioResult:
    """Maximally entangled probe reaches 4 diag(t^2, sin^2(Bt), sin^2(Bt) cos^2(theta))."""
    family = UnitaryFamily(
        n_params=3,
        hamiltonian=_field_hamiltonian,
        dhamiltonian=_field_dhamiltonians(),
        t=t,
    )
    gens = generator_h(family, np.array([b, theta, phi]))
    probe = DensityMatrix.from_pure(bell_probe())
    computed = qfim_unitary(spectral_decompose(probe), gens).matrix
    s2 = np.sin(b * t) ** 2
    closed = 4.0 * np.diag([t**2, s2, s2 * np.cos(theta) ** 2])
    return _result(
        "two-qubit-ancilla",
        {"B": b, "theta": theta, "phi": phi, "t": t},
        computed,
        closed,
        bounds=_bound_quantities(computed),
    )


def scenario_controlled_field(
    b: float, theta: float, phi: float, dt_block: float, n_blocks: int
) -> ScenarioResult:
    """N evolve-then-antievolve blocks with the control built at the true value.

    The QFIM reaches ``4 N^2 diag(dt^2, sin^2(B dt), sin^2(B dt) cos^2 theta)``
    and approaches ``4 diag(t^2, B^2 t^2, B^2 t^2 cos^2 theta)`` as the block
    length shrinks at fixed total time.
    """
    if n_blocks < 1 or dt_block <= 0:
        raise DomainError("need n_blocks >= 1 and dt_block > 0")
    x_true = np.array([b, theta, phi])
    family = UnitaryFamily(
        n_params=3,
        hamiltonian=_field_hamiltonian,
        dhamiltonian=_field_dhamiltonians(),
        t=dt_block,
    )
    u_true = family.evaluate_unitary(x_true)
    control = dag(u_true)
    psi0 = bell_probe()

    def block_state(x):
        u = family.evaluate_unitary(x)
        block = control @ u
        psi = psi0.copy()
        for _ in range(n_blocks):
            psi = block @ psi
        return psi

    step = 1e-6
    psi = block_state(x_true)
    dpsi = []
    for a in range(3):
        xp = x_true.copy()
        xp[a] += step
        xm = x_true.copy()
        xm[a] -= step
        dpsi.append((block_state(xp) - block_state(xm)) / (2.0 * step))
    computed = qfim_pure(psi, dpsi)[0].matrix

    s2 = np.sin(b * dt_block) ** 2
    closed = 4.0 * n_blocks**2 * np.diag([dt_block**2, s2, s2 * np.cos(theta) ** 2])
    limit = 4.0 * (n_blocks * dt_block) ** 2 * np.diag(
        [1.0, b**2, b**2 * np.cos(theta) ** 2]
    )
    return _result(
        "controlled-field",
        {"B": b, "theta": theta, "phi": phi, "dt": dt_block, "N": n_blocks},
        computed,
        closed,
        bounds={**_bound_quantities(computed), "zero_dt_limit": limit.tolist()},
    )


# ---------------------------------------------------------------------------
# Double-phase Mach-Zehnder interferometer.

def scenario_mzi_double_phase(alpha: complex, chi_fock, cutoff: int) -> ScenarioResult:
    """Sum/difference-phase QFIM of a coherent (x) chi input vs moment formulas."""
    chi = np.asarray(chi_fock, dtype=complex).reshape(-1)
    if chi.size != cutoff + 1:
        raise DomainError(f"chi has {chi.size} amplitudes, expected cutoff+1 = {cutoff + 1}")
    if abs(np.linalg.norm(chi) - 1.0) > 1e-10:
        raise DomainError("chi must be normalized")
    if abs(chi[-1]) ** 2 > FOCK_TAIL:
        raise DomainError("chi truncation tail exceeds 1e-10")
    coh = coherent_fock(alpha, cutoff)
    if 1.0 - float(np.linalg.norm(coh) ** 2) > FOCK_TAIL:
        raise DomainError("coherent-state truncation tail exceeds 1e-10; raise the cutoff")

    k = cutoff + 1
    a_op = destroy(cutoff)
    num = dag(a_op) @ a_op
    eye = np.eye(k, dtype=complex)
    na = kron(num, eye)
    nb = kron(eye, num)
    jx = 0.5 * (kron(dag(a_op), a_op) + kron(a_op, dag(a_op)))

    state_in = kron(coh.reshape(-1, 1), chi.reshape(-1, 1)).reshape(-1)
    splitter = scipy.sparse.csc_matrix(-0.5j * np.pi * jx)
    psi = scipy.sparse.linalg.expm_multiply(splitter, state_in)
    psi = psi / np.linalg.norm(psi)

    g_tot = 0.5 * (na + nb)
    g_d = 0.5 * (na - nb)
    computed = qfim_pure(psi, [1j * (g_tot @ psi), 1j * (g_d @ psi)])[0].matrix

    # Moments of the chi port.
    b_mean = complex(np.vdot(chi, a_op @ chi))
    b2_mean = complex(np.vdot(chi, a_op @ a_op @ chi))
    n_mean = float(np.real(np.vdot(chi, num @ chi)))
    n2_mean = float(np.real(np.vdot(chi, num @ num @ chi)))
    ndag_b2 = complex(np.vdot(chi, dag(a_op) @ a_op @ a_op @ chi))
    var_n = n2_mean - n_mean**2
    cov_b_bdag = n_mean + 0.5 - abs(b_mean) ** 2
    var_bdag = np.conj(b2_mean) - np.conj(b_mean) ** 2

    amp2 = abs(alpha) ** 2
    f_tt = amp2 + var_n
    f_dd = 2.0 * amp2 * cov_b_bdag - 2.0 * np.real(alpha**2 * var_bdag) + n_mean
    f_td = 2.0 * np.imag(np.conj(alpha) * b_mean) + 2.0 * np.imag(
        np.conj(alpha) * (ndag_b2 - n_mean * b_mean)
    )
    closed = np.array([[f_tt, f_td], [f_td, f_dd]])
    return _result(
        "mzi-double-phase",
        {"alpha": complex(alpha), "cutoff": cutoff},
        computed,
        closed,
        bounds=_bound_quantities(computed),
    )


# ---------------------------------------------------------------------------
# Generalized N00N states.

def scenario_noon(d: int, n_photons: int, c1: float) -> ScenarioResult:
    """(d+1)-mode N00N state: F_ij = 4 N^2 (delta_ij c1^2 - c1^4)."""
    if d < 1 or n_photons < 1:
        raise DomainError("need d >= 1 and N >= 1")
    c0_sq = 1.0 - d * c1**2
    if c0_sq < -1e-12:
        raise DomainError(f"c1 = {c1} violates normalization (c0^2 = {c0_sq:.3e})")
    c0 = np.sqrt(max(c0_sq, 0.0))

    # Occupation basis: |N 0...0>, then |0...N...0> per signal mode.
    psi = np.concatenate(([c0], np.full(d, c1))).astype(complex)
    occupations = [np.zeros(d)]
    for i in range(d):
        occ = np.zeros(d)
        occ[i] = n_photons
        occupations.append(occ)
    occ_matrix = np.array(occupations)  # (d+1, d)
    dpsi = [1j * occ_matrix[:, j] * psi for j in range(d)]
    computed = qfim_pure(psi, dpsi)[0].matrix

    closed = 4.0 * n_photons**2 * (np.eye(d) * c1**2 - np.full((d, d), c1**4))
    c1_opt = 1.0 / np.sqrt(d + np.sqrt(d))
    min_tr = (1.0 + np.sqrt(d)) ** 2 * d / (4.0 * n_photons**2)
    return _result(
        "noon",
        {"d": d, "N": n_photons, "c1": c1},
        computed,
        closed,
        bounds={
            **_bound_quantities(computed),
            "optimal_c1": float(c1_opt),
            "min_trace_f_inverse": float(min_tr),
        },
    )


# ---------------------------------------------------------------------------
# Generalized entangled coherent states.

def _ecs_state(d: int, alpha: complex, c0: float, c1: float, cutoff: int):
    """Exact-overlap ECS on the sparse occupation basis (vacuum + single-mode ladders)."""
    coh = coherent_fock(alpha, cutoff)
    dim = 1 + (d + 1) * cutoff
    psi = np.zeros(dim, dtype=complex)
    # Index 0 is the global vacuum; mode i's k-photon ket sits at 1 + i*cutoff + (k-1).
    psi[0] = (c0 + d * c1) * coh[0]
    weights = [c0] + [c1] * d
    for mode in range(d + 1):
        base = 1 + mode * cutoff
        psi[base : base + cutoff] = weights[mode] * coh[1:]
    number = np.zeros((d + 1, dim))
    for mode in range(d + 1):
        base = 1 + mode * cutoff
        number[mode, base : base + cutoff] = np.arange(1, cutoff + 1)
    return psi, number


def scenario_ecs(d: int, alpha: complex, c1: float) -> ScenarioResult:
    """Generalized entangled coherent state with exact overlap normalization.

    The closed form ``F_ij = 4 c1^2 |a|^2 [delta_ij (1 + |a|^2) - c1^2 |a|^2]``
    is exact in the effective (normalized) coefficient; evaluated at the
    nominal ``c1`` it additionally requires ``exp(-|a|^2)`` overlaps to be
    negligible (|alpha| of 2 or more).
    """
    if d < 1:
        raise DomainError("need d >= 1")
    c0_sq = 1.0 - d * c1**2
    if c0_sq < -1e-12:
        raise DomainError(f"c1 = {c1} violates normalization (c0^2 = {c0_sq:.3e})")
    c0 = np.sqrt(max(c0_sq, 0.0))
    cutoff = coherent_cutoff(alpha)
    psi, number = _ecs_state(d, alpha, c0, c1, cutoff)
    norm = np.linalg.norm(psi)
    psi = psi / norm
    c1_eff = c1 / norm

    dpsi = [1j * number[mode + 1] * psi for mode in range(d)]
    computed = qfim_pure(psi, dpsi)[0].matrix

    amp2 = abs(alpha) ** 2
    closed_eff = 4.0 * c1_eff**2 * amp2 * (np.eye(d) * (1.0 + amp2) - np.full((d, d), c1_eff**2 * amp2))
    closed_nominal = 4.0 * c1**2 * amp2 * (np.eye(d) * (1.0 + amp2) - np.full((d, d), c1**2 * amp2))
    min_tr = (1.0 + np.sqrt(d)) ** 2 * d / (4.0 * (1.0 + amp2) ** 2)
    c1_opt_sq = (1.0 + amp2) / (amp2 * (d + np.sqrt(d)))
    return _result(
        "ecs",
        {"d": d, "alpha": complex(alpha), "c1": c1},
        computed,
        closed_eff,
        bounds={
            **_bound_quantities(computed),
            "min_trace_f_inverse": float(min_tr),
            "optimal_c1_sq": float(c1_opt_sq),
        },
        flags={
            "effective_c1": float(c1_eff),
            "nominal_closed_form_deviation": float(
                np.max(np.abs(computed - closed_nominal))
            ),
            "overlap_scale": float(np.exp(-amp2)),
        },
    )


SCENARIOS = {
    "dephasing": scenario_dephasing_qubit,
    "spin-field": scenario_spin_field,
    "two-qubit-ancilla": scenario_two_qubit_ancilla,
    "controlled-field": scenario_controlled_field,
    "mzi": scenario_mzi_double_phase,
    "noon": scenario_noon,
    "ecs": scenario_ecs,
}
