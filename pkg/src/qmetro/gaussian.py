"""Gaussian-state metrology: Williamson decomposition, SLD coefficients, QFIM.

Conventions: quadratures ``q = (a + a†)/sqrt(2)``, ``p = (a - a†)/(i sqrt 2)``
with hbar = 1, vacuum variance 1/2, operator ordering ``(q1, p1, ..., qm, pm)``
and symplectic form ``Omega = direct_sum([[0, 1], [-1, 0]])``.  (Under the
hbar = 2 convention every covariance here is doubled and symplectic
eigenvalues are >= 1.)

The quadratic SLD coefficient ``G_a`` solves ``Omega G Omega + 4 C G C =
2 dC/dx_a``; note the factor 2 on the right-hand side, which the closed-form
checks (coherent-displacement QFI = 2, squeezed-vacuum QFI = 2) pin down.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalFailureError
from .numerics import frobenius_norm
from .qfim_core import QfimMatrix

PURE_MODE_TOL = 1e-10


def symplectic_form(modes: int) -> np.ndarray:
    """Block-diagonal symplectic form for the (q1, p1, ..., qm, pm) ordering."""
    w = np.array([[0.0, 1.0], [-1.0, 0.0]])
    omega = np.zeros((2 * modes, 2 * modes))
    for k in range(modes):
        omega[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = w
    return omega


@dataclass(frozen=True)
class GaussianState:
    """First and second moments of an m-mode bosonic state."""

    displacement: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.displacement, dtype=float).reshape(-1)
        c = np.asarray(self.covariance, dtype=float)
        if d.size % 2 != 0 or c.shape != (d.size, d.size):
            raise DomainError(
                f"inconsistent moments: displacement {d.shape}, covariance {c.shape}"
            )
        scale = max(1.0, frobenius_norm(c))
        if frobenius_norm(c - c.T) > 1e-10 * scale:
            raise DomainError("covariance matrix is not symmetric")
        omega = symplectic_form(d.size // 2)
        w = np.linalg.eigvalsh(c.astype(complex) + 0.5j * omega)
        if w[0] < -1e-9:
            raise DomainError(
                f"covariance violates the uncertainty relation (min eig {w[0]:.3e})"
            )
        object.__setattr__(self, "displacement", d)
        object.__setattr__(self, "covariance", (c + c.T) / 2.0)

    @property
    def modes(self) -> int:
        return self.displacement.size // 2


def vacuum_state(modes: int = 1) -> GaussianState:
    return GaussianState(np.zeros(2 * modes), 0.5 * np.eye(2 * modes))


def coherent_state(alpha: complex) -> GaussianState:
    d = np.sqrt(2.0) * np.array([np.real(alpha), np.imag(alpha)])
    return GaussianState(d, 0.5 * np.eye(2))


def squeezed_vacuum_state(r: float) -> GaussianState:
    """Squeezed vacuum generated by exp(r (a†^2 - a^2)/2): q stretched by e^r."""
    return GaussianState(np.zeros(2), 0.5 * np.diag([np.exp(2 * r), np.exp(-2 * r)]))


def thermal_gaussian_state(nbar: float) -> GaussianState:
    if nbar < 0:
        raise DomainError("mean photon number must be >= 0")
    return GaussianState(np.zeros(2), (nbar + 0.5) * np.eye(2))


@dataclass(frozen=True)
class WilliamsonDecomp:
    """``C = S diag(c_k I_2) S^T`` with symplectic ``S`` (``S Omega S^T = Omega``)."""

    s: np.ndarray
    symplectic_eigenvalues: np.ndarray


def williamson(c) -> WilliamsonDecomp:
    """Williamson normal form of a physical covariance matrix.

    The symplectic eigenvalues are the moduli of the eigenvalues of
    ``i Omega C``.  Rows of ``S^-1`` come from the real/imaginary parts of the
    positive-frequency eigenvectors, scaled so ``u^T Omega v = 1``; degenerate
    eigenvalues are symplectically orthonormalized, and each eigenvector's
    phase is fixed by making its largest-magnitude component real positive.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    if c.ndim != 2 or c.shape[1] != n or n % 2 != 0:
        raise DomainError(f"covariance must be square with even size, got {c.shape}")
    modes = n // 2
    omega = symplectic_form(modes)
    uncert = np.linalg.eigvalsh(c.astype(complex) + 0.5j * omega)
    if uncert[0] < -1e-9:
        raise DomainError(
            f"covariance violates the uncertainty relation (min eig {uncert[0]:.3e})"
        )

    evals, evecs = np.linalg.eig(omega @ c)
    pos = np.flatnonzero(np.imag(evals) > 0)
    if pos.size != modes:
        raise NumericalFailureError("could not pair the spectrum of Omega C")
    order = pos[np.argsort(np.imag(evals[pos]))]
    cs = np.imag(evals[order])
    vecs = [evecs[:, i].copy() for i in order]

    def sform(w1, w2):
        # Hermitian positive form on the positive-frequency eigenspace.
        return complex(np.conj(w1) @ (-1j * omega) @ w2) / 2.0

    # Symplectic Gram-Schmidt within (near-)degenerate blocks; distinct
    # symplectic eigenvalues are orthogonal automatically.
    for i in range(modes):
        for j in range(i):
            if abs(cs[i] - cs[j]) <= 1e-8 * max(1.0, cs[i]):
                vecs[i] = vecs[i] - sform(vecs[j], vecs[i]) * vecs[j]
        norm = sform(vecs[i], vecs[i]).real
        if norm <= 0:
            raise NumericalFailureError("symplectic normalization failed")
        vecs[i] = vecs[i] / np.sqrt(norm)
        k = int(np.argmax(np.abs(vecs[i])))
        phase = vecs[i][k] / abs(vecs[i][k])
        vecs[i] = vecs[i] / phase

    t = np.zeros((n, n))
    for k, w in enumerate(vecs):
        t[2 * k] = np.real(w)
        t[2 * k + 1] = np.imag(w)
    s = np.linalg.inv(t)

    cd = np.repeat(cs, 2)
    if frobenius_norm(s @ omega @ s.T - omega) > 1e-8 * max(1.0, frobenius_norm(s) ** 2):
        raise NumericalFailureError("constructed S is not symplectic")
    if frobenius_norm((s * cd) @ s.T - c) > 1e-8 * max(1.0, frobenius_norm(c)):
        raise NumericalFailureError("Williamson reconstruction failed")
    return WilliamsonDecomp(s=s, symplectic_eigenvalues=cs)


@dataclass(frozen=True)
class GaussianSld:
    """SLD of a Gaussian state: ``L = l0 + l1 . R + R^T g R``."""

    l0: float
    l1: np.ndarray
    g: np.ndarray


def _basis_blocks():
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    return [
        inv_sqrt2 * np.array([[0.0, 1.0], [-1.0, 0.0]]),   # i sigma_y, sign -1
        inv_sqrt2 * np.array([[1.0, 0.0], [0.0, -1.0]]),   # sigma_z, sign +1
        inv_sqrt2 * np.eye(2),                              # identity, sign -1
        inv_sqrt2 * np.array([[0.0, 1.0], [1.0, 0.0]]),    # sigma_x, sign +1
    ]


def _solve_g(c: np.ndarray, dc: np.ndarray, decomp: WilliamsonDecomp) -> np.ndarray:
    """Solve ``Omega G Omega + 4 C G C = 2 dC`` via the Williamson basis."""
    modes = c.shape[0] // 2
    cs = decomp.symplectic_eigenvalues
    t = np.linalg.inv(decomp.s)
    m = t @ dc @ t.T
    blocks = _basis_blocks()
    signs = (-1.0, 1.0, -1.0, 1.0)
    gs = np.zeros_like(c)
    for j in range(modes):
        for k in range(modes):
            sub = m[2 * j : 2 * j + 2, 2 * k : 2 * k + 2]
            for l, (blk, sign) in enumerate(zip(blocks, signs)):
                coeff = float(np.sum(sub * blk))
                denom = 4.0 * cs[j] * cs[k] + sign
                if abs(denom) < PURE_MODE_TOL:
                    if abs(coeff) < PURE_MODE_TOL:
                        continue  # pure-mode 0/0 channel: det C constant, numerator vanishes
                    raise DomainError(
                        f"ill-posed covariance derivative: divergent channel (j={j}, k={k}, "
                        f"l={l}) has nonvanishing coefficient {coeff:.3e}"
                    )
                gs[2 * j : 2 * j + 2, 2 * k : 2 * k + 2] += (2.0 * coeff / denom) * blk
    g = t.T @ gs @ t
    return (g + g.T) / 2.0


def gaussian_sld(state: GaussianState, dd, dc) -> list[GaussianSld]:
    """SLD coefficients per parameter from moment derivatives.

    Parameters
    ----------
    state : GaussianState
    dd, dc : sequences of array_like
        Derivatives of the displacement vector and covariance matrix, one
        entry per estimated parameter.
    """
    if len(dd) != len(dc):
        raise DomainError("dd and dc must have one entry per parameter")
    c = state.covariance
    d = state.displacement
    decomp = williamson(c)
    c_inv = np.linalg.inv(c)
    out = []
    for a, (dda, dca) in enumerate(zip(dd, dc)):
        dda = np.asarray(dda, dtype=float).reshape(-1)
        dca = np.asarray(dca, dtype=float)
        if dda.shape != d.shape or dca.shape != c.shape:
            raise DomainError(f"moment derivative {a} has inconsistent shape")
        g = _solve_g(c, dca, decomp)
        l1 = c_inv @ dda - 2.0 * g @ d
        l0 = float(d @ g @ d - dda @ c_inv @ d - np.trace(g @ c))
        out.append(GaussianSld(l0=l0, l1=l1, g=g))
    return out


def single_mode_g(state: GaussianState, dca) -> np.ndarray:
    """Closed-form ``G_a`` for one mode.

    Mixed: ``2 (4c^2-1)/(4c^2+1) Omega (dJ) Omega`` with ``J = C/(4c^2-1)``;
    pure (``c = 1/2``): ``2 Omega (dC) Omega / (4c^2+1)``.
    """
    if state.modes != 1:
        raise DomainError("single_mode_g requires a one-mode state")
    c = state.covariance
    dca = np.asarray(dca, dtype=float)
    omega = symplectic_form(1)
    det = float(np.linalg.det(c))
    cval = np.sqrt(det)
    if 4.0 * det - 1.0 < PURE_MODE_TOL:
        return 2.0 * omega @ dca @ omega / (4.0 * det + 1.0)
    # d(det C) via Jacobi's formula feeds dJ.
    ddet = det * float(np.trace(np.linalg.inv(c) @ dca))
    dj = dca / (4.0 * det - 1.0) - c * (4.0 * ddet) / (4.0 * det - 1.0) ** 2
    return 2.0 * (4.0 * det - 1.0) / (4.0 * det + 1.0) * omega @ dj @ omega


def gaussian_qfim(state: GaussianState, dd, dc) -> QfimMatrix:
    """``F_ab = Tr(G_a dC/dx_b) + (d d/dx_a)^T C^-1 (d d/dx_b)``."""
    slds = gaussian_sld(state, dd, dc)
    c_inv = np.linalg.inv(state.covariance)
    n = len(slds)
    f = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            dda = np.asarray(dd[a], dtype=float).reshape(-1)
            ddb = np.asarray(dd[b], dtype=float).reshape(-1)
            f[a, b] = float(np.trace(slds[a].g @ np.asarray(dc[b], dtype=float)))
            f[a, b] += float(dda @ c_inv @ ddb)
    return QfimMatrix((f + f.T) / 2.0)
