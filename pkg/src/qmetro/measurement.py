"""POVMs, classical Fisher information, and optimal-measurement construction.

The classical Fisher information of any POVM never exceeds the QFIM; the
constructions here (SLD eigenbasis for one parameter, projective completion of
the state itself for pure multiparameter families) are the standard ways to
close that gap when the attainability condition allows it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import as_complex_matrix, dag, frobenius_norm, hermitian_part
from .states import ParamFamily, as_density, state_derivatives

ZERO_PROB = 1e-14
ZERO_DERIV = 1e-12


@dataclass(frozen=True)
class Povm:
    """Positive operator-valued measure: PSD elements summing to the identity."""

    elements: tuple

    def __post_init__(self):
        ops = tuple(as_complex_matrix(e, "POVM element") for e in self.elements)
        if not ops:
            raise DomainError("POVM needs at least one element")
        d = ops[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for e in ops:
            if e.shape != (d, d):
                raise DomainError("POVM elements must share one dimension")
            if np.linalg.eigvalsh(hermitian_part(e))[0] < -1e-10:
                raise DomainError("POVM element is not positive semidefinite")
            total += e
        if frobenius_norm(total - np.eye(d)) > 1e-9 * d:
            raise DomainError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", ops)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]


@dataclass(frozen=True)
class CfimResult:
    """CFIM with the outcomes that contributed a singular (infinite) direction."""

    matrix: np.ndarray
    singular_outcomes: tuple = ()


def cfim_from_probabilities(probs, dprobs) -> CfimResult:
    """Assemble ``I_ab = sum_y (d_a p_y)(d_b p_y)/p_y`` with 0/0 set to zero.

    Outcomes with ``p_y < 1e-14`` but a non-negligible derivative are skipped
    and reported as singular contributions.
    """
    p = np.asarray(probs, dtype=float)
    dp = np.asarray(dprobs, dtype=float)  # shape (n_params, n_outcomes)
    n = dp.shape[0]
    mat = np.zeros((n, n))
    singular = []
    for y in range(p.size):
        if p[y] < ZERO_PROB:
            if np.max(np.abs(dp[:, y])) >= ZERO_DERIV:
                singular.append(y)
            continue
        mat += np.outer(dp[:, y], dp[:, y]) / p[y]
    return CfimResult(matrix=mat, singular_outcomes=tuple(singular))


def cfim(family: ParamFamily, x, povm: Povm) -> CfimResult:
    """Classical Fisher information matrix of a fixed POVM on a family."""
    rho = family.density(x)
    if rho.shape[0] != povm.dim:
        raise DomainError("POVM dimension does not match the state")
    drho = state_derivatives(family, x)
    probs = [float(np.real(np.trace(rho @ e))) for e in povm.elements]
    dprobs = [
        [float(np.real(np.trace(d @ e))) for e in povm.elements] for d in drho
    ]
    return cfim_from_probabilities(probs, dprobs)


def sld_measurement(sld, rho) -> tuple[Povm, float]:
    """Projective measurement in the SLD eigenbasis plus its frozen-point CFI.

    With the measurement held fixed and only the state differentiated, the
    CFI at the working point is ``sum_i l_i^2 <l_i|rho|l_i> = Tr(rho L^2)``,
    i.e. exactly the QFI.
    """
    l_op = as_complex_matrix(sld, "sld")
    if frobenius_norm(l_op - dag(l_op)) > 1e-9 * max(1.0, frobenius_norm(l_op)):
        raise DomainError("SLD must be Hermitian")
    r = as_density(rho)
    w, v = np.linalg.eigh(hermitian_part(l_op))
    projectors = tuple(np.outer(v[:, i], np.conj(v[:, i])) for i in range(w.size))
    povm = Povm(projectors)
    cfi = 0.0
    for i, proj in enumerate(projectors):
        cfi += w[i] ** 2 * float(np.real(np.trace(r @ proj)))
    return povm, cfi


def optimal_pure_projectors(psi_hat, seed_basis) -> Povm:
    """Rank-1 projective POVM containing ``|psi_hat><psi_hat|``.

    The remaining vectors are Gram-Schmidt completions of ``seed_basis`` in
    caller order; seeds with residual norm below 1e-10 are skipped.  Raises if
    the seeds do not span the orthogonal complement.
    """
    psi = np.asarray(psi_hat, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise DomainError("psi_hat must be normalized")
    vectors = [psi]
    for seed in seed_basis:
        v = np.asarray(seed, dtype=complex).reshape(-1)
        for u in vectors:
            v = v - np.vdot(u, v) * u
        norm = np.linalg.norm(v)
        if norm < 1e-10:
            continue
        vectors.append(v / norm)
    if len(vectors) != psi.size:
        raise DomainError(
            f"seed basis spans only {len(vectors)} of {psi.size} dimensions"
        )
    return Povm(tuple(np.outer(v, np.conj(v)) for v in vectors))


@dataclass(frozen=True)
class OptimalityReport:
    """Per-projector check of the pure-state optimal-measurement conditions.

    Set A holds projectors orthogonal to the state, set B the rest.  For A
    members every ``Im(<d_a psi|m_k><m_k|d_b psi>)`` must vanish; for B
    members ``Im(<d_a psi|m_k><m_k|psi>)`` must equal
    ``|<psi|m_k>|^2 Im(<d_a psi|psi>)``.
    """

    set_a: tuple
    set_b: tuple
    max_violation_a: float
    max_violation_b: float
    optimal: bool
    tolerance: float


def optimality_conditions(psi, dpsi, povm: Povm, tol: float = 1e-8) -> OptimalityReport:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    dpsi = [np.asarray(d, dtype=complex).reshape(-1) for d in dpsi]
    d = psi.size
    vectors = []
    for e in povm.elements:
        w, v = np.linalg.eigh(hermitian_part(np.asarray(e)))
        if abs(w[-1] - 1.0) > 1e-8 or np.any(np.abs(w[:-1]) > 1e-8):
            raise DomainError("optimality_conditions needs rank-1 projectors")
        vectors.append(v[:, -1])
    if len(vectors) != d:
        raise DomainError(f"projector set has {len(vectors)} elements, expected {d}")

    set_a, set_b = [], []
    viol_a = viol_b = 0.0
    for k, m in enumerate(vectors):
        overlap = np.vdot(psi, m)
        if abs(overlap) < 1e-8:
            set_a.append(k)
            for a in range(len(dpsi)):
                for b in range(len(dpsi)):
                    term = np.vdot(dpsi[a], m) * np.vdot(m, dpsi[b])
                    viol_a = max(viol_a, abs(float(np.imag(term))))
        else:
            set_b.append(k)
            for a in range(len(dpsi)):
                lhs = float(np.imag(np.vdot(dpsi[a], m) * np.vdot(m, psi)))
                rhs = abs(overlap) ** 2 * float(np.imag(np.vdot(dpsi[a], psi)))
                viol_b = max(viol_b, abs(lhs - rhs))
    return OptimalityReport(
        set_a=tuple(set_a),
        set_b=tuple(set_b),
        max_violation_a=viol_a,
        max_violation_b=viol_b,
        optimal=bool(max(viol_a, viol_b) < tol),
        tolerance=tol,
    )
