"""Density-matrix model and parameterized state families.

A :class:`ParamFamily` maps a real parameter vector to a state (density matrix
or normalized pure vector) and knows how to differentiate itself, either from
user-supplied analytic callbacks or by central finite differences.  Spectral
decomposition with explicit support detection feeds every QFIM engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NumericalFailureError
from .numerics import as_complex_matrix, dag, frobenius_norm, hermitian_eig, hermitian_part

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10

#: Relative threshold separating the support from the numerical kernel.
DEFAULT_SUPPORT_THRESHOLD = 1e-12

#: Eigenvalues within this relative gap are treated as one degenerate block.
DEGENERACY_GAP = 1e-10

DEFAULT_FD_SCALE = 1e-6


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix: Hermitian, unit trace, positive semidefinite."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix, "density matrix")
        if m.shape[0] != m.shape[1]:
            raise DomainError(f"density matrix must be square, got {m.shape}")
        scale = max(frobenius_norm(m), 1.0)
        if frobenius_norm(m - dag(m)) > HERMITIAN_TOL * scale:
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise DomainError(f"density matrix trace {np.trace(m):.3e} != 1")
        w = np.linalg.eigvalsh(hermitian_part(m))
        if w[0] < -POSITIVITY_TOL:
            raise DomainError(f"density matrix has negative eigenvalue {w[0]:.3e}")
        object.__setattr__(self, "matrix", hermitian_part(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, psi) -> "DensityMatrix":
        v = np.asarray(psi, dtype=complex).reshape(-1)
        n = np.linalg.norm(v)
        if n < 1e-12:
            raise DomainError("cannot build a density matrix from the zero vector")
        v = v / n
        return cls(np.outer(v, np.conj(v)))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def __array__(self, dtype=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def as_density(rho) -> np.ndarray:
    """Accept a DensityMatrix or a raw array and return the matrix."""
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return as_complex_matrix(rho, "density matrix")


@dataclass(frozen=True)
class SpectralData:
    """Eigendata of a density matrix with its numerical support.

    ``support`` indexes the eigenvalues above ``threshold * max(eigenvalues)``;
    ``degenerate_groups`` lists index blocks whose eigenvalues agree within a
    relative gap of ``1e-10`` (any orthonormal basis of such a block is valid
    for the QFIM formulas used downstream).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    support: np.ndarray
    support_threshold: float
    degenerate_groups: tuple = ()

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def rank(self) -> int:
        return int(self.support.size)

    def density(self) -> np.ndarray:
        v, w = self.eigenvectors, self.eigenvalues
        return (v * w) @ dag(v)


def spectral_decompose(rho, support_threshold: float = DEFAULT_SUPPORT_THRESHOLD) -> SpectralData:
    """Diagonalize ``rho`` and detect its support.

    Parameters
    ----------
    rho : DensityMatrix or array_like
    support_threshold : float
        Relative threshold: eigenvalues below ``support_threshold * max(w)``
        are assigned to the kernel.
    """
    m = as_density(rho)
    if not 0.0 < support_threshold < 1.0:
        raise DomainError(f"support_threshold must lie in (0, 1), got {support_threshold}")
    eig = hermitian_eig(m)
    w = eig.eigenvalues
    cut = support_threshold * max(float(np.max(w)), np.finfo(float).tiny)
    support = np.flatnonzero(w > cut)
    if support.size == 0:
        raise DomainError("support threshold excludes every eigenvalue")

    groups, current = [], [0]
    scale = max(float(np.max(np.abs(w))), np.finfo(float).tiny)
    for i in range(1, w.size):
        if abs(w[i] - w[i - 1]) <= DEGENERACY_GAP * scale:
            current.append(i)
        else:
            groups.append(tuple(current))
            current = [i]
    groups.append(tuple(current))

    return SpectralData(
        eigenvalues=w,
        eigenvectors=eig.eigenvectors,
        support=support,
        support_threshold=cut,
        degenerate_groups=tuple(groups),
    )


@dataclass
class ParamFamily:
    """Differentiable map from a parameter vector to a quantum state.

    ``evaluate(x)`` may return a density matrix (2-D) or a normalized pure
    state vector (1-D).  Derivatives come from ``analytic_derivatives`` when
    given (one callback per parameter, returning the Hermitian traceless
    d rho / d x_a), otherwise from central finite differences with step
    ``fd_scale * max(1, |x_a|)`` applied to the density matrix, which for pure
    families is insensitive to the evaluator's global phase.

    Callbacks must be reentrant: families are evaluated concurrently by the
    CLI grid runner.
    """

    n_params: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    analytic_derivatives: Sequence[Callable[[np.ndarray], np.ndarray]] | None = None
    fd_scale: float = DEFAULT_FD_SCALE
    domain: str = ""

    def density(self, x) -> np.ndarray:
        """Evaluate the family and return a density matrix regardless of kind."""
        out = np.asarray(self.evaluate(np.asarray(x, dtype=float)), dtype=complex)
        if out.ndim == 1:
            return np.outer(out, np.conj(out))
        return out

    def is_pure(self, x) -> bool:
        return np.asarray(self.evaluate(np.asarray(x, dtype=float))).ndim == 1

    def fd_steps(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.fd_scale * np.maximum(1.0, np.abs(x))


def state_derivatives(family: ParamFamily, x) -> list[np.ndarray]:
    """Derivatives of the density matrix, one Hermitian traceless matrix per parameter."""
    x = np.asarray(x, dtype=float)
    if x.size != family.n_params:
        raise DomainError(f"expected {family.n_params} parameters, got {x.size}")

    if family.analytic_derivatives is not None:
        out = []
        for a, cb in enumerate(family.analytic_derivatives):
            d = as_complex_matrix(cb(x), f"d rho / d x_{a}")
            scale = max(frobenius_norm(d), 1.0)
            if frobenius_norm(d - dag(d)) > 1e-9 * scale:
                raise DomainError(f"analytic derivative {a} is not Hermitian")
            if abs(np.trace(d)) > 1e-9 * scale:
                raise DomainError(f"analytic derivative {a} is not traceless")
            out.append(hermitian_part(d))
        return out

    steps = family.fd_steps(x)
    out = []
    for a in range(family.n_params):
        try:
            xp = x.copy()
            xp[a] += steps[a]
            xm = x.copy()
            xm[a] -= steps[a]
            d = (family.density(xp) - family.density(xm)) / (2.0 * steps[a])
        except Exception as exc:  # noqa: BLE001 - reported with parameter context
            raise NumericalFailureError(
                f"family evaluation failed while differentiating parameter {a}"
            ) from exc
        out.append(hermitian_part(d))
    return out


def state_vector_derivatives(family: ParamFamily, x) -> list[np.ndarray]:
    """Central-difference derivatives of a pure family's state vector.

    The evaluator must return vectors with a smooth phase convention; the
    derivative inherits that gauge.
    """
    x = np.asarray(x, dtype=float)
    psi0 = np.asarray(family.evaluate(x), dtype=complex)
    if psi0.ndim != 1:
        raise DomainError("state_vector_derivatives requires a pure-state family")
    steps = family.fd_steps(x)
    out = []
    for a in range(family.n_params):
        xp = x.copy()
        xp[a] += steps[a]
        xm = x.copy()
        xm[a] -= steps[a]
        out.append(
            (np.asarray(family.evaluate(xp), dtype=complex) - np.asarray(family.evaluate(xm), dtype=complex))
            / (2.0 * steps[a])
        )
    return out


def random_density_matrix(dim: int, rank: int, seed: int) -> DensityMatrix:
    """Seeded Ginibre state: ``G G† / Tr(G G†)`` with G of shape (dim, rank)."""
    if not 1 <= rank <= dim:
        raise DomainError(f"rank must satisfy 1 <= rank <= dim, got rank={rank}, dim={dim}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ dag(g)
    return DensityMatrix(m / np.trace(m))


def random_hermitian(dim: int, seed: int, scale: float = 1.0) -> np.ndarray:
    """Seeded GUE-style Hermitian matrix, Frobenius-normalized to ``scale``."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = hermitian_part(a)
    return scale * h / max(frobenius_norm(h), 1e-300)


def random_unitary(dim: int, seed: int) -> np.ndarray:
    """Seeded Haar-ish unitary from the QR decomposition of a Ginibre matrix."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))
