"""GRAPE pulse optimization against Fisher-information objectives.

Piecewise-constant controls act on a Lindblad master equation vectorized in
Liouville space.  The state and its parameter derivatives propagate together
through one block-triangular slice exponential, so both are exact for the
discrete dynamics; control gradients differentiate those slice exponentials
with a 3-point Gauss quadrature of the Frechet integral, which keeps the
analytic gradient consistent with finite differences of the implemented
objective to well below optimizer-relevant precision.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import DomainError, NumericalFailureError
from .measurement import Povm, cfim_from_probabilities
from .numerics import as_complex_matrix, dag, hermitian_part, is_hermitian, vec, unvec
from .qfim_core import sld_compute
from .states import as_density, spectral_decompose

OBJECTIVES = ("qfi_aa", "cfi_aa", "f_eff", "i_eff", "f0_cfim", "f0_qfim")

# 3-point Gauss-Legendre nodes on [0, 1]; symmetric, so the complementary
# time arguments reuse the same node exponentials.
_GAUSS_NODES = (0.5 - np.sqrt(3.0 / 5.0) / 2.0, 0.5, 0.5 + np.sqrt(3.0 / 5.0) / 2.0)
_GAUSS_WEIGHTS = (5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0)

ZERO_PROB = 1e-14


@dataclass
class ControlProblem:
    """Hamiltonian-estimation control problem on a piecewise-constant grid.

    ``hamiltonian(x)`` and ``dhamiltonian[a](x)`` define the free evolution
    and its parameter derivatives; ``controls`` are the control Hamiltonians
    whose amplitudes ``amplitudes[k, j]`` are optimized, slice duration
    ``dt``.  Lindblad rates are constant in time and parameter-independent.
    """

    hamiltonian: Callable[[np.ndarray], np.ndarray]
    dhamiltonian: Sequence[Callable[[np.ndarray], np.ndarray]]
    controls: Sequence[np.ndarray]
    amplitudes: np.ndarray
    dt: float
    probe: np.ndarray
    lindblad_ops: Sequence[np.ndarray] = ()
    rates: Sequence[float] = ()
    objective: str = "qfi_aa"
    param_index: int = 0
    povm: Povm | None = None
    learning_rate: float = 0.01
    max_iterations: int = 500
    tolerance: float = 1e-8

    def __post_init__(self):
        self.amplitudes = np.atleast_2d(np.asarray(self.amplitudes, dtype=float))
        if self.amplitudes.shape[0] != len(self.controls):
            raise DomainError(
                f"amplitudes has {self.amplitudes.shape[0]} rows for "
                f"{len(self.controls)} controls"
            )
        if self.n_slices < 1 or self.dt <= 0:
            raise DomainError("need at least one slice of positive duration")
        if self.objective not in OBJECTIVES:
            raise DomainError(f"unknown objective {self.objective!r}; choose from {OBJECTIVES}")
        if self.objective in ("cfi_aa", "i_eff", "f0_cfim") and self.povm is None:
            raise DomainError(f"objective {self.objective!r} requires a POVM")
        if any(g < 0 for g in self.rates):
            raise DomainError("decay rates must be non-negative")
        if len(self.rates) != len(self.lindblad_ops):
            raise DomainError("one rate per Lindblad operator is required")
        if self.objective == "f0_qfim":
            warnings.warn(
                "f0_qfim bounds Tr(F^-1) from below; that bound is not always "
                "attainable by any measurement",
                stacklevel=2,
            )

    @property
    def n_slices(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def n_controls(self) -> int:
        return len(self.controls)

    @property
    def n_params(self) -> int:
        return len(self.dhamiltonian)

    @property
    def total_time(self) -> float:
        return self.n_slices * self.dt


@dataclass(frozen=True)
class PropagationTrace:
    """States at every slice boundary plus the slice superoperators."""

    states: tuple             # rho_j, j = 0..m
    dstates: tuple            # per parameter: d rho_j, j = 0..m
    slice_superops: tuple     # exp(dt * E_j) on the plain Liouville space
    extended_superops: tuple  # exp(dt * E~_j) on the (rho, d rho) stack
    extended_liouvillians: tuple
    amplitudes: np.ndarray

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_dstates(self) -> tuple:
        return tuple(d[-1] for d in self.dstates)


def lindblad_liouvillian(h, lindblad_ops, rates) -> np.ndarray:
    """Row-major-vec superoperator of ``-i[H, .] + sum_j gamma_j D[Gamma_j]``."""
    hm = as_complex_matrix(h, "hamiltonian")
    d = hm.shape[0]
    eye = np.eye(d)
    liou = -1j * (np.kron(hm, eye) - np.kron(eye, hm.T))
    for gamma, g in zip(rates, lindblad_ops):
        g = as_complex_matrix(g, "lindblad operator")
        gg = dag(g) @ g
        liou += gamma * (
            np.kron(g, g.conj()) - 0.5 * np.kron(gg, eye) - 0.5 * np.kron(eye, gg.T)
        )
    return liou


def _slice_hamiltonians(problem: ControlProblem, x, amplitudes) -> list[np.ndarray]:
    x = np.asarray(x, dtype=float)
    h0 = as_complex_matrix(problem.hamiltonian(x), "H0(x)")
    if not is_hermitian(h0):
        raise DomainError("H0(x) is not Hermitian")
    ctrls = [as_complex_matrix(hk, "control hamiltonian") for hk in problem.controls]
    for hk in ctrls:
        if not is_hermitian(hk):
            raise DomainError("control Hamiltonian is not Hermitian")
    out = []
    for j in range(amplitudes.shape[1]):
        h = h0.copy()
        for k, hk in enumerate(ctrls):
            h = h + amplitudes[k, j] * hk
        out.append(h)
    return out


def _extended_liouvillian(problem: ControlProblem, x, h_slice) -> np.ndarray:
    """Block lower-triangular generator propagating (rho, d_1 rho, ..., d_n rho)."""
    x = np.asarray(x, dtype=float)
    base = lindblad_liouvillian(h_slice, problem.lindblad_ops, problem.rates)
    d2 = base.shape[0]
    n = problem.n_params
    ext = np.zeros(((n + 1) * d2, (n + 1) * d2), dtype=complex)
    for blk in range(n + 1):
        ext[blk * d2 : (blk + 1) * d2, blk * d2 : (blk + 1) * d2] = base
    eye = np.eye(int(round(np.sqrt(d2))))
    for a in range(n):
        dh = as_complex_matrix(problem.dhamiltonian[a](x), f"dH/dx_{a}")
        if not is_hermitian(dh):
            raise DomainError(f"dH/dx_{a} is not Hermitian")
        ext[(a + 1) * d2 : (a + 2) * d2, :d2] = -1j * (
            np.kron(dh, eye) - np.kron(eye, dh.T)
        )
    return ext


def propagate(problem: ControlProblem, x, amplitudes=None) -> PropagationTrace:
    """Propagate the probe and its parameter derivatives through all slices.

    Raises :class:`NumericalFailureError` naming the slice if an intermediate
    state drifts from unit trace by more than 1e-6 or loses positivity.
    """
    amps = problem.amplitudes if amplitudes is None else np.atleast_2d(np.asarray(amplitudes, dtype=float))
    rho0 = as_density(problem.probe)
    d = rho0.shape[0]
    d2 = d * d
    n = problem.n_params
    hams = _slice_hamiltonians(problem, x, amps)

    sigma = np.zeros((n + 1) * d2, dtype=complex)
    sigma[:d2] = vec(rho0)
    states = [rho0]
    dstates = [[np.zeros((d, d), dtype=complex)] for _ in range(n)]
    slice_superops = []
    extended_superops = []
    extended_liouvillians = []

    for j, h in enumerate(hams):
        ext = _extended_liouvillian(problem, x, h)
        prop = scipy.linalg.expm(problem.dt * ext)
        sigma = prop @ sigma
        rho = unvec(sigma[:d2], d)
        drift = abs(np.real(np.trace(rho)) - 1.0)
        if drift > 1e-6 or np.linalg.eigvalsh(hermitian_part(rho))[0] < -1e-8:
            raise NumericalFailureError(f"non-physical state after slice {j}")
        states.append(rho)
        for a in range(n):
            dstates[a].append(unvec(sigma[(a + 1) * d2 : (a + 2) * d2], d))
        slice_superops.append(prop[:d2, :d2].copy())
        extended_superops.append(prop)
        extended_liouvillians.append(ext)

    return PropagationTrace(
        states=tuple(states),
        dstates=tuple(tuple(traj) for traj in dstates),
        slice_superops=tuple(slice_superops),
        extended_superops=tuple(extended_superops),
        extended_liouvillians=tuple(extended_liouvillians),
        amplitudes=amps.copy(),
    )


def _fisher_from_states(problem: ControlProblem, rho_t, drho_t):
    """QFIM + SLDs or CFIM + probability data at the final time."""
    if problem.objective in ("qfi_aa", "f_eff", "f0_qfim"):
        spectral = spectral_decompose(rho_t)
        slds = sld_compute(spectral, drho_t, method="eigenbasis")
        n = len(drho_t)
        f = np.zeros((n, n))
        for a in range(n):
            for b in range(a, n):
                la, lb = slds.operators[a], slds.operators[b]
                f[a, b] = f[b, a] = 0.5 * float(
                    np.real(np.trace(rho_t @ (la @ lb + lb @ la)))
                )
        return f, slds
    probs = np.array(
        [float(np.real(np.trace(rho_t @ e))) for e in problem.povm.elements]
    )
    dprobs = np.array(
        [[float(np.real(np.trace(d @ e))) for e in problem.povm.elements] for d in drho_t]
    )
    return cfim_from_probabilities(probs, dprobs).matrix, (probs, dprobs)


def _scalar_objective(problem: ControlProblem, fisher: np.ndarray) -> float:
    if problem.objective in ("qfi_aa", "cfi_aa"):
        return float(fisher[problem.param_index, problem.param_index])
    if problem.objective in ("f_eff", "i_eff"):
        if fisher.shape != (2, 2):
            raise DomainError("effective Fisher objectives require exactly 2 parameters")
        tr = float(np.trace(fisher))
        return float(np.linalg.det(fisher)) / tr if tr > 0 else 0.0
    diag = np.diagonal(fisher)
    if np.any(diag <= 0):
        return 0.0
    return float(1.0 / np.sum(1.0 / diag))


def objective_value(problem: ControlProblem, x, trace: PropagationTrace | None = None) -> float:
    """Scalar information objective at the final time of a propagation."""
    if trace is None:
        trace = propagate(problem, x)
    fisher, _ = _fisher_from_states(problem, trace.final_state, trace.final_dstates)
    return _scalar_objective(problem, fisher)


def _objective_chain(problem: ControlProblem, fisher: np.ndarray) -> dict:
    """Weights d(objective)/dF_ab over the (a <= b) pairs that contribute."""
    if problem.objective in ("qfi_aa", "cfi_aa"):
        a = problem.param_index
        return {(a, a): 1.0}
    if problem.objective in ("f_eff", "i_eff"):
        tr = float(np.trace(fisher))
        if tr <= 0:
            return {}
        f00, f11, f01 = fisher[0, 0], fisher[1, 1], fisher[0, 1]
        return {
            (0, 0): (f11**2 + f01**2) / tr**2,
            (1, 1): (f00**2 + f01**2) / tr**2,
            (0, 1): -2.0 * f01 / tr,
        }
    diag = np.diagonal(fisher)
    if np.any(diag <= 0):
        return {}
    f0 = 1.0 / np.sum(1.0 / diag)
    return {(a, a): (f0 / diag[a]) ** 2 for a in range(diag.size)}


def grape_gradients(problem: ControlProblem, x, trace: PropagationTrace) -> np.ndarray:
    """Gradient of the scalar objective w.r.t. every control amplitude.

    Chain rule through exact slice derivatives: the Frechet derivative of each
    extended slice exponential in the control direction is integrated by a
    symmetric 3-point Gauss rule, then contracted against the final-time SLDs
    (QFIM objectives) or the log-derivative POVM weights (CFIM objectives).
    """
    rho0 = as_density(problem.probe)
    d = rho0.shape[0]
    d2 = d * d
    n = problem.n_params
    m = problem.n_slices
    p = problem.n_controls
    eye = np.eye(d)

    fisher, extra = _fisher_from_states(problem, trace.final_state, trace.final_dstates)
    chain = _objective_chain(problem, fisher)
    if not chain:
        return np.zeros((p, m))

    sigmas = []
    for j in range(m + 1):
        s = np.zeros((n + 1) * d2, dtype=complex)
        s[:d2] = vec(trace.states[j])
        for a in range(n):
            s[(a + 1) * d2 : (a + 2) * d2] = vec(trace.dstates[a][j])
        sigmas.append(s)

    # suffix[j] = G_{m-1} ... G_{j+1} applies everything after slice j.
    dim_ext = (n + 1) * d2
    suffix = [np.eye(dim_ext, dtype=complex)]
    for g in reversed(trace.extended_superops[1:]):
        suffix.append(suffix[-1] @ g)
    suffix = suffix[::-1]

    ctrl_superops = [
        np.kron(np.asarray(hk, dtype=complex), eye) - np.kron(eye, np.asarray(hk, dtype=complex).T)
        for hk in problem.controls
    ]

    grads = np.zeros((p, m))
    for j in range(m):
        ext = trace.extended_liouvillians[j]
        nodes = [scipy.linalg.expm(problem.dt * t * ext) for t in _GAUSS_NODES]
        for k in range(p):
            direction = -1j * ctrl_superops[k]
            dsig = np.zeros(dim_ext, dtype=complex)
            # int_0^dt exp((dt-s)E) dE exp(s E) ds; node i pairs with node 2-i.
            for w_i, (pa, pb) in zip(_GAUSS_WEIGHTS, ((2, 0), (1, 1), (0, 2))):
                inner = nodes[pb] @ sigmas[j]
                for blk in range(n + 1):
                    inner[blk * d2 : (blk + 1) * d2] = direction @ inner[blk * d2 : (blk + 1) * d2]
                dsig += (w_i * problem.dt) * (nodes[pa] @ inner)
            dsig = suffix[j] @ dsig

            drho = unvec(dsig[:d2], d)
            ddrho = [unvec(dsig[(a + 1) * d2 : (a + 2) * d2], d) for a in range(n)]

            total = 0.0
            if problem.objective in ("qfi_aa", "f_eff", "f0_qfim"):
                slds = extra
                for (a, b), weight in chain.items():
                    la, lb = slds.operators[a], slds.operators[b]
                    dfab = float(np.real(np.trace(ddrho[a] @ lb)))
                    dfab += float(np.real(np.trace(ddrho[b] @ la)))
                    dfab -= 0.5 * float(np.real(np.trace(drho @ (la @ lb + lb @ la))))
                    total += weight * dfab
            else:
                probs, dprobs = extra
                dp = np.array([float(np.real(np.trace(drho @ e))) for e in problem.povm.elements])
                ddp = np.array(
                    [[float(np.real(np.trace(dd @ e))) for e in problem.povm.elements] for dd in ddrho]
                )
                for (a, b), weight in chain.items():
                    difab = 0.0
                    for y in range(probs.size):
                        if probs[y] < ZERO_PROB:
                            continue
                        la = dprobs[a, y] / probs[y]
                        lb = dprobs[b, y] / probs[y]
                        difab += lb * ddp[a, y] + la * ddp[b, y] - la * lb * dp[y]
                    total += weight * difab
            grads[k, j] = total
    return grads


def grape_finite_difference(problem: ControlProblem, x, step: float = 1e-5) -> np.ndarray:
    """Central finite differences of the objective over every amplitude.

    Only the perturbed slice is re-exponentiated; the rest of the trajectory
    reuses the base slice propagators, so the oracle stays exact without m^2
    matrix exponentials.
    """
    base = propagate(problem, x)
    rho0 = as_density(problem.probe)
    d = rho0.shape[0]
    d2 = d * d
    n = problem.n_params
    sigma0 = np.zeros((n + 1) * d2, dtype=complex)
    sigma0[:d2] = vec(rho0)
    hams = _slice_hamiltonians(problem, x, base.amplitudes)

    def value_with_slice(j: int, k: int, delta: float) -> float:
        h = hams[j] + delta * np.asarray(problem.controls[k], dtype=complex)
        prop = scipy.linalg.expm(problem.dt * _extended_liouvillian(problem, x, h))
        sigma = sigma0
        for i in range(problem.n_slices):
            sigma = (prop if i == j else base.extended_superops[i]) @ sigma
        rho_t = unvec(sigma[:d2], d)
        drho_t = [unvec(sigma[(a + 1) * d2 : (a + 2) * d2], d) for a in range(n)]
        fisher, _ = _fisher_from_states(problem, rho_t, drho_t)
        return _scalar_objective(problem, fisher)

    grads = np.zeros((problem.n_controls, problem.n_slices))
    for j in range(problem.n_slices):
        for k in range(problem.n_controls):
            grads[k, j] = (
                value_with_slice(j, k, step) - value_with_slice(j, k, -step)
            ) / (2.0 * step)
    return grads


@dataclass(frozen=True)
class GrapeResult:
    """Optimization record: per-iteration objectives and the best iterate.

    The simultaneous update is not monotone, so the best-seen controls are
    returned rather than the last ones.
    """

    history: tuple
    best_objective: float
    best_amplitudes: np.ndarray
    iterations: int
    converged: bool


def grape_run(problem: ControlProblem, x) -> GrapeResult:
    """Gradient-ascent loop: evaluate, differentiate, update all amplitudes.

    Stops when the relative objective change drops below ``tolerance`` or
    after ``max_iterations``; aborts if the objective turns NaN.  The problem
    instance itself is left untouched.
    """
    amplitudes = problem.amplitudes.copy()
    trace = propagate(problem, x, amplitudes)
    current = objective_value(problem, x, trace)
    if not np.isfinite(current):
        raise NumericalFailureError("objective is NaN at iteration 0")
    history = [current]
    best_obj, best_amp = current, amplitudes.copy()

    iterations = 0
    converged = False
    for it in range(1, problem.max_iterations + 1):
        grads = grape_gradients(problem, x, trace)
        amplitudes = amplitudes + problem.learning_rate * grads
        trace = propagate(problem, x, amplitudes)
        value = objective_value(problem, x, trace)
        if not np.isfinite(value):
            raise NumericalFailureError(f"objective became NaN at iteration {it}")
        history.append(value)
        iterations = it
        if value > best_obj:
            best_obj, best_amp = value, amplitudes.copy()
        if abs(value - history[-2]) < problem.tolerance * max(abs(history[-2]), 1e-30):
            converged = True
            break

    return GrapeResult(
        history=tuple(history),
        best_objective=best_obj,
        best_amplitudes=best_amp,
        iterations=iterations,
        converged=converged,
    )
