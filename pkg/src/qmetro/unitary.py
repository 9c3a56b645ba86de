"""Generators of unitary parameterizations and the unitary-process QFIM.

For a family ``rho(x) = U(x) rho0 U(x)†`` everything about the parameters is
carried by the Hermitian operators ``H_a = i (d_a U†) U``; the QFIM is a
weighted covariance of the ``H_a`` on the probe's eigenbasis and never needs
the evolved state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, MethodUnsupportedError
from .numerics import as_complex_matrix, dag, frobenius_norm, hermitian_part, is_hermitian, matrix_exp
from .qfim_core import QfimMatrix
from .states import SpectralData

SERIES_MAX_TERMS = 300
SERIES_RTOL = 1e-14
DEFAULT_UNITARY_FD_STEP = 1e-6


@dataclass
class UnitaryFamily:
    """Unitary parameterization in Hamiltonian or direct form.

    Hamiltonian form supplies ``hamiltonian(x)`` with derivatives
    ``dhamiltonian[a](x)`` and an evolution time ``t`` (``U = exp(-i H t)``);
    direct form supplies ``unitary(x)`` and generators come from central
    differences with step ``fd_step``.
    """

    n_params: int
    hamiltonian: Callable[[np.ndarray], np.ndarray] | None = None
    dhamiltonian: Sequence[Callable[[np.ndarray], np.ndarray]] | None = None
    t: float = 1.0
    unitary: Callable[[np.ndarray], np.ndarray] | None = None
    fd_step: float = DEFAULT_UNITARY_FD_STEP

    def evaluate_unitary(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.unitary is not None:
            u = as_complex_matrix(self.unitary(x), "U(x)")
        elif self.hamiltonian is not None:
            h = self._check_hermitian(self.hamiltonian(x), "H(x)")
            u = matrix_exp(-1j * self.t * h)
        else:
            raise DomainError("UnitaryFamily needs either a hamiltonian or a unitary callback")
        d = u.shape[0]
        if frobenius_norm(u @ dag(u) - np.eye(d)) > 1e-9 * max(1.0, frobenius_norm(u)):
            raise DomainError("U(x) is not unitary")
        return u

    @staticmethod
    def _check_hermitian(m, name: str) -> np.ndarray:
        a = as_complex_matrix(m, name)
        if not is_hermitian(a):
            raise DomainError(f"{name} is not Hermitian")
        return a


@dataclass(frozen=True)
class GeneratorSet:
    """Hermitian generators ``H_a = i (d_a U†) U`` and ``K_a = i (d_a U) U† = -U H_a U†``."""

    h_ops: tuple
    k_ops: tuple


def generator_h(family: UnitaryFamily, x) -> GeneratorSet:
    """Compute the generator set of a unitary family at the point ``x``.

    Hamiltonian form uses the nested-commutator series
    ``H_a = -sum_n t^(n+1)/(n+1)! (i H^x)^n d_a H`` truncated when the added
    term drops below ``1e-14`` of the accumulated norm; direct form
    differentiates ``U`` by central differences.
    """
    x = np.asarray(x, dtype=float)
    if family.hamiltonian is not None and family.dhamiltonian is not None:
        h = family._check_hermitian(family.hamiltonian(x), "H(x)")
        u = family.evaluate_unitary(x)
        h_ops = []
        for a in range(family.n_params):
            dh = family._check_hermitian(family.dhamiltonian[a](x), f"dH/dx_{a}")
            term = -family.t * dh
            acc = term.copy()
            converged = False
            for n in range(1, SERIES_MAX_TERMS):
                # (i H^x) term recurrence, with the t/(n+1) coefficient update.
                term = 1j * (h @ term - term @ h) * (family.t / (n + 1))
                acc += term
                if frobenius_norm(term) < SERIES_RTOL * max(frobenius_norm(acc), 1e-300):
                    converged = True
                    break
            if not converged:
                raise MethodUnsupportedError(
                    f"generator series for parameter {a} did not converge in "
                    f"{SERIES_MAX_TERMS} terms; supply the family in direct (unitary) form"
                )
            h_ops.append(hermitian_part(acc))
    elif family.unitary is not None:
        u = family.evaluate_unitary(x)
        step = family.fd_step
        h_ops = []
        for a in range(family.n_params):
            xp = x.copy()
            xp[a] += step
            xm = x.copy()
            xm[a] -= step
            du = (family.evaluate_unitary(xp) - family.evaluate_unitary(xm)) / (2.0 * step)
            h_ops.append(hermitian_part(1j * dag(du) @ u))
    else:
        raise DomainError(
            "UnitaryFamily needs hamiltonian+dhamiltonian callbacks or a unitary callback"
        )

    k_ops = tuple(hermitian_part(-u @ ha @ dag(u)) for ha in h_ops)
    return GeneratorSet(h_ops=tuple(h_ops), k_ops=k_ops)


def _overlaps(basis: np.ndarray, ops) -> np.ndarray:
    """Overlap matrices <i|H_a|j> in the probe eigenbasis."""
    return np.stack([dag(basis) @ op @ basis for op in ops])


def qfim_unitary(probe: SpectralData, gens: GeneratorSet) -> QfimMatrix:
    """QFIM of a unitary process from the probe eigendata and the ``H_a``.

    ``F_ab = sum_{i in S} 4 w_i cov_i(H_a, H_b)
    - sum_{i != j in S} 8 w_i w_j / (w_i + w_j) Re(<i|H_a|j><j|H_b|i>)``
    with the symmetrized covariance on each eigenvector.
    """
    if not gens.h_ops:
        raise DomainError("empty generator set")
    d = np.asarray(gens.h_ops[0]).shape[0]
    if probe.dim != d:
        raise DomainError(f"probe dimension {probe.dim} does not match generators ({d})")
    if probe.rank == 0:
        raise DomainError("probe has empty support")

    w = probe.eigenvalues
    sup = probe.support
    overlaps = _overlaps(probe.eigenvectors, gens.h_ops)
    n = len(gens.h_ops)
    f = np.zeros((n, n))
    for a in range(n):
        ha = overlaps[a]
        for b in range(a, n):
            hb = overlaps[b]
            val = 0.0
            for i in sup:
                cov = 0.5 * float(np.real(ha[i] @ hb[:, i] + hb[i] @ ha[:, i]))
                cov -= float(np.real(ha[i, i]) * np.real(hb[i, i]))
                val += 4.0 * w[i] * cov
            for i in sup:
                for j in sup:
                    if i == j:
                        continue
                    val -= (
                        8.0 * w[i] * w[j] / (w[i] + w[j])
                        * float(np.real(ha[i, j] * hb[j, i]))
                    )
            f[a, b] = f[b, a] = val
    return QfimMatrix(f)


def attainability_pure_unitary(psi0, gens: GeneratorSet, tol: float = 1e-8):
    """Weak-commutativity test ``<psi0|[H_a, H_b]|psi0> = 0`` for a pure probe.

    Returns the real matrix of ``<psi0|[H_a,H_b]|psi0>/i`` values and whether
    all of them are below ``tol``.
    """
    psi = np.asarray(psi0, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise DomainError("probe state must be normalized")
    n = len(gens.h_ops)
    m = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            ha, hb = gens.h_ops[a], gens.h_ops[b]
            val = np.vdot(psi, (ha @ hb - hb @ ha) @ psi) / 1j
            m[a, b] = float(np.real(val))
            m[b, a] = -m[a, b]
    return m, bool(np.max(np.abs(m)) < tol) if n > 1 else True
