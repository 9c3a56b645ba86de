"""SLD solvers, QFIM engines, Cramer-Rao reports and attainability checks.

Five routes to the QFIM live here: the degeneracy-safe spectral double sum
(default), the pure-state overlap formula, the Bloch-vector form, the
single-qubit basis-independent closed form, and SLD-based assembly for the
Liouville / series solvers.  All engines take precomputed state derivatives so
the differentiation strategy stays the family's business.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MethodUnsupportedError
from .numerics import (
    as_complex_matrix,
    dag,
    frobenius_norm,
    hermitian_part,
    pseudo_inverse,
    vec,
    unvec,
)
from .states import SpectralData, as_density, spectral_decompose

SLD_METHODS = ("eigenbasis", "liouville", "series")

SERIES_MAX_TERMS = 200
SERIES_RTOL = 1e-12


@dataclass(frozen=True)
class QfimMatrix:
    """Real symmetric positive-semidefinite Fisher information matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"QFIM must be square, got shape {m.shape}")
        scale = max(1.0, frobenius_norm(m))
        if frobenius_norm(m - m.T) > 1e-9 * scale:
            raise DomainError("QFIM is not symmetric")
        m = (m + m.T) / 2.0
        w = np.linalg.eigvalsh(m)
        if w[0] < -1e-8 * scale:
            raise DomainError(f"QFIM has negative eigenvalue {w[0]:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def n_params(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True)
class SldSet:
    """Symmetric logarithmic derivatives, one Hermitian operator per parameter.

    ``gauge`` records how the kernel-kernel block was fixed; zeroing it is the
    deterministic choice and does not affect any QFIM value.
    """

    operators: tuple
    gauge: str
    method: str


def _eigenbasis_overlaps(spectral: SpectralData, drho) -> list[np.ndarray]:
    v = spectral.eigenvectors
    return [dag(v) @ as_complex_matrix(d, "drho") @ v for d in drho]


def _check_dims(spectral: SpectralData, drho) -> None:
    for a, d in enumerate(drho):
        d = np.asarray(d)
        if d.shape != (spectral.dim, spectral.dim):
            raise DomainError(
                f"derivative {a} has shape {d.shape}, expected {(spectral.dim, spectral.dim)}"
            )


def sld_compute(spectral: SpectralData, drho, method: str = "eigenbasis") -> SldSet:
    """Solve ``d rho = (rho L + L rho) / 2`` for every parameter.

    Parameters
    ----------
    spectral : SpectralData
        Eigendata of the state; the support threshold decides which blocks of
        the equation are solvable.
    drho : sequence of array_like
        Hermitian derivatives of the state, one per parameter.
    method : {"eigenbasis", "liouville", "series"}
        ``eigenbasis`` handles any rank and zeroes the kernel-kernel block
        (gauge choice).  ``liouville`` solves the vectorized equation
        ``(rho (x) 1 + 1 (x) rho*) vec(L) = 2 vec(d rho)``; ``series`` sums a
        geometrically convergent anticommutator series.  Both require full
        rank.
    """
    if method not in SLD_METHODS:
        raise DomainError(f"unknown SLD method {method!r}, expected one of {SLD_METHODS}")
    _check_dims(spectral, drho)
    w, v = spectral.eigenvalues, spectral.eigenvectors

    if method == "eigenbasis":
        denom = w[:, None] + w[None, :]
        reachable = denom > spectral.support_threshold
        ops = []
        for wa in _eigenbasis_overlaps(spectral, drho):
            lw = np.zeros_like(wa)
            lw[reachable] = 2.0 * wa[reachable] / denom[reachable]
            ops.append(hermitian_part(v @ lw @ dag(v)))
        return SldSet(operators=tuple(ops), gauge="kernel-block-zeroed", method=method)

    if spectral.rank < spectral.dim:
        raise MethodUnsupportedError(
            f"SLD method {method!r} requires a full-rank state; rank is "
            f"{spectral.rank} of {spectral.dim}"
        )
    rho = spectral.density()

    if method == "liouville":
        d = spectral.dim
        a = np.kron(rho, np.eye(d)) + np.kron(np.eye(d), rho.conj())
        ops = tuple(
            hermitian_part(unvec(np.linalg.solve(a, 2.0 * vec(dr)), d)) for dr in drho
        )
        return SldSet(operators=ops, gauge="full-rank", method=method)

    # Series: L = (2/c) sum_k M^k(d rho) with M(X) = X - (rho X + X rho)/c and
    # c = w_min + w_max, which makes the iteration contract with ratio
    # (w_max - w_min)/(w_max + w_min) < 1 for full-rank states.
    c = float(w[0] + w[-1])
    ops = []
    for dr in drho:
        term = as_complex_matrix(dr, "drho").copy()
        acc = term.copy()
        converged = False
        for _ in range(SERIES_MAX_TERMS):
            term = term - (rho @ term + term @ rho) / c
            acc += term
            if frobenius_norm(term) < SERIES_RTOL * max(frobenius_norm(acc), 1e-300):
                converged = True
                break
        if not converged:
            raise MethodUnsupportedError(
                f"series SLD did not converge in {SERIES_MAX_TERMS} terms "
                f"(spectrum ratio {w[0] / w[-1]:.2e} too small)"
            )
        ops.append(hermitian_part(2.0 * acc / c))
    return SldSet(operators=tuple(ops), gauge="full-rank", method="series")


def sld_residual(spectral: SpectralData, drho, slds: SldSet) -> float:
    """Max norm of ``d rho - (rho L + L rho)/2`` on the support-reachable block."""
    w, v = spectral.eigenvalues, spectral.eigenvectors
    rho = spectral.density()
    reachable = (w[:, None] + w[None, :]) > spectral.support_threshold
    worst = 0.0
    for dr, op in zip(drho, slds.operators):
        res = as_complex_matrix(dr, "drho") - (rho @ op + op @ rho) / 2.0
        res_eig = dag(v) @ res @ v
        worst = max(worst, frobenius_norm(res_eig[reachable]))
    return worst


def qfim_from_slds(rho, slds) -> QfimMatrix:
    """Assemble ``F_ab = Re Tr(rho {L_a, L_b}) / 2`` from explicit SLDs.

    ``slds`` may be an :class:`SldSet` or any sequence of Hermitian operators.
    """
    r = as_density(rho)
    operators = slds.operators if isinstance(slds, SldSet) else tuple(slds)
    n = len(operators)
    f = np.zeros((n, n))
    for a in range(n):
        la = operators[a]
        for b in range(a, n):
            lb = operators[b]
            f[a, b] = f[b, a] = 0.5 * float(np.real(np.trace(r @ (la @ lb + lb @ la))))
    return QfimMatrix(f)


def qfim_general(spectral: SpectralData, drho) -> QfimMatrix:
    """Degeneracy-safe QFIM from eigendata and state derivatives.

    Sums ``2 Re(<i|d_a rho|j><j|d_b rho|i>) / (w_i + w_j)`` over every ordered
    eigenvector pair with ``w_i + w_j`` above the support threshold.  No
    eigenvector derivatives enter, so degenerate blocks need no special care.
    """
    _check_dims(spectral, drho)
    if spectral.rank == 0:
        raise DomainError("empty support")
    w = spectral.eigenvalues
    denom = w[:, None] + w[None, :]
    mask = denom > spectral.support_threshold
    overlaps = _eigenbasis_overlaps(spectral, drho)
    n = len(overlaps)
    f = np.zeros((n, n))
    for a in range(n):
        wa = overlaps[a]
        for b in range(a, n):
            wb = overlaps[b]
            terms = 2.0 * np.real(wa * np.conj(wb))[mask] / denom[mask]
            f[a, b] = f[b, a] = float(np.sum(terms))
    return QfimMatrix(f)


def qfim_pure(psi, dpsi) -> tuple[QfimMatrix, list[np.ndarray]]:
    """QFIM of a pure parameterized state plus its SLDs.

    ``F_ab = 4 Re(<d_a psi|d_b psi> - <d_a psi|psi><psi|d_b psi>)`` and
    ``L_a = 2(|psi><d_a psi| + |d_a psi><psi|)``.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise DomainError(f"state vector norm {np.linalg.norm(psi):.12f} != 1")
    dpsi = [np.asarray(d, dtype=complex).reshape(-1) for d in dpsi]
    n = len(dpsi)
    f = np.zeros((n, n))
    for a in range(n):
        for b in range(a, n):
            val = np.vdot(dpsi[a], dpsi[b]) - np.vdot(dpsi[a], psi) * np.vdot(psi, dpsi[b])
            f[a, b] = f[b, a] = 4.0 * float(np.real(val))
    slds = [
        hermitian_part(2.0 * (np.outer(psi, np.conj(d)) + np.outer(d, np.conj(psi))))
        for d in dpsi
    ]
    return QfimMatrix(f), slds


def gell_mann_basis(d: int) -> list[np.ndarray]:
    """Generalized Gell-Mann su(d) generators with ``Tr(k_i k_j) = 2 delta_ij``."""
    if d < 2:
        raise DomainError("gell_mann_basis requires d >= 2")
    basis = []
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            basis.append(sym)
            asym = np.zeros((d, d), dtype=complex)
            asym[j, k] = -1j
            asym[k, j] = 1j
            basis.append(asym)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        basis.append(np.diag(diag).astype(complex) * np.sqrt(2.0 / (l * (l + 1))))
    return basis


def bloch_vector(rho, generators=None) -> np.ndarray:
    """Bloch coordinates of a state: ``r_i = sqrt(d/(2(d-1))) Tr(rho k_i)``."""
    m = as_density(rho)
    d = m.shape[0]
    gens = generators if generators is not None else gell_mann_basis(d)
    coef = np.sqrt(d / (2.0 * (d - 1)))
    return np.array([coef * float(np.real(np.trace(m @ k))) for k in gens])


def density_from_bloch(r, generators=None, d: int | None = None) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if d is None:
        d = int(round(np.sqrt(r.size + 1)))
    gens = generators if generators is not None else gell_mann_basis(d)
    m = np.eye(d, dtype=complex) / d
    coef = np.sqrt(d * (d - 1) / 2.0) / d
    for ri, k in zip(r, gens):
        m = m + coef * ri * k
    return m


def qfim_bloch(r, dr, d: int = 2, generators=None) -> QfimMatrix:
    """QFIM in the Bloch representation.

    For a qubit this is ``dr_a . dr_b + (r.dr_a)(r.dr_b)/(1-|r|^2)`` with the
    second term dropped for pure states.  For general ``d`` it is
    ``(d_b r)^T [d/(2(d-1)) G - r r^T]^{-1} d_a r`` with
    ``G_ij = Tr(rho {k_i, k_j})/2``.
    """
    r = np.asarray(r, dtype=float)
    dr = [np.asarray(x, dtype=float) for x in dr]
    if r.size != d * d - 1:
        raise DomainError(f"Bloch vector has length {r.size}, expected {d * d - 1}")
    norm2 = float(r @ r)
    if norm2 > 1.0 + 1e-10:
        raise DomainError(f"Bloch vector norm^2 = {norm2:.6f} exceeds 1")
    n = len(dr)

    if d == 2:
        f = np.zeros((n, n))
        pure = norm2 >= 1.0 - 1e-9
        for a in range(n):
            for b in range(a, n):
                val = float(dr[a] @ dr[b])
                if not pure:
                    val += float((r @ dr[a]) * (r @ dr[b])) / (1.0 - norm2)
                f[a, b] = f[b, a] = val
        return QfimMatrix(f)

    gens = generators if generators is not None else gell_mann_basis(d)
    for k in gens:
        if abs(np.trace(k)) > 1e-10:
            raise DomainError("generators must be traceless")
    rho = density_from_bloch(r, gens, d)
    g = np.array([[float(np.real(np.trace(rho @ ki @ kj))) for kj in gens] for ki in gens])
    bracket = d / (2.0 * (d - 1)) * g - np.outer(r, r)
    try:
        y = np.linalg.solve(bracket, np.column_stack(dr))
    except np.linalg.LinAlgError as exc:
        raise MethodUnsupportedError(
            "Bloch bracket matrix is singular (pure state); use the qubit/pure path"
        ) from exc
    if np.linalg.cond(bracket) > 1e12:
        raise MethodUnsupportedError(
            "Bloch bracket matrix is near-singular (nearly pure state); "
            "use the qubit/pure path"
        )
    f = np.column_stack(dr).T @ y
    return QfimMatrix((f + f.T) / 2.0)


def qfim_qubit_closed_form(rho, drho, branch: str = "auto") -> QfimMatrix:
    """Basis-independent single-qubit QFIM.

    Mixed branch: ``Tr(d_a rho d_b rho) + Tr(rho d_a rho rho d_b rho)/det(rho)``;
    pure branch: ``2 Tr(d_a rho d_b rho)``.
    """
    m = as_density(rho)
    if m.shape != (2, 2):
        raise DomainError(f"qubit closed form requires a 2x2 state, got {m.shape}")
    det = float(np.real(np.linalg.det(m)))
    if branch == "mixed" and det <= 1e-12:
        raise DomainError(
            f"det(rho) = {det:.3e} is below threshold; fall back to the pure branch"
        )
    use_pure = branch == "pure" or (branch == "auto" and det <= 1e-12)
    drho = [as_complex_matrix(x, "drho") for x in drho]
    n = len(drho)
    f = np.zeros((n, n))
    for a in range(n):
        for b in range(a, n):
            t1 = float(np.real(np.trace(drho[a] @ drho[b])))
            if use_pure:
                f[a, b] = f[b, a] = 2.0 * t1
            else:
                t2 = float(np.real(np.trace(m @ drho[a] @ m @ drho[b])))
                f[a, b] = f[b, a] = t1 + t2 / det
    return QfimMatrix(f)


def rld_qfim(rho, drho) -> np.ndarray:
    """Right-logarithmic-derivative information matrix ``Tr(d_a rho d_b rho rho^-1)``.

    Complex Hermitian with a real diagonal; requires a full-rank state.
    """
    spectral = rho if isinstance(rho, SpectralData) else spectral_decompose(rho)
    w, v = spectral.eigenvalues, spectral.eigenvectors
    if w[0] <= 1e-10:
        raise MethodUnsupportedError(
            f"RLD requires a full-rank state; smallest eigenvalue is {w[0]:.3e}"
        )
    rho_inv = (v / w) @ dag(v)
    drho = [as_complex_matrix(x, "drho") for x in drho]
    n = len(drho)
    f = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            f[a, b] = np.trace(drho[a] @ drho[b] @ rho_inv)
    return (f + dag(f)) / 2.0


def reparameterize(f: QfimMatrix, jacobian) -> QfimMatrix:
    """Pull the QFIM back through ``y = y(x)``: ``F(x) = J^T F(y) J`` with ``J_ij = dy_i/dx_j``."""
    j = np.asarray(jacobian, dtype=float)
    if j.ndim != 2 or j.shape[0] != f.n_params:
        raise DomainError(
            f"Jacobian shape {j.shape} does not match QFIM with {f.n_params} parameters"
        )
    return QfimMatrix(j.T @ f.matrix @ j)


@dataclass(frozen=True)
class AttainabilityReport:
    """Weak-commutativity data ``T_ab = Tr(rho [L_a, L_b]) / i``.

    The multiparameter Cramer-Rao bound is saturable iff T vanishes.  For a
    pure state the Berry curvature is ``-T/4``.
    """

    t_matrix: np.ndarray
    attainable: bool
    tolerance: float
    berry_curvature: np.ndarray | None = None


def attainability_check(rho, slds: SldSet, tol: float = 1e-8) -> AttainabilityReport:
    r = as_density(rho)
    n = len(slds.operators)
    t = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            la, lb = slds.operators[a], slds.operators[b]
            val = np.trace(r @ (la @ lb - lb @ la)) / 1j
            t[a, b] = float(np.real(val))
            t[b, a] = -t[a, b]
    purity = float(np.real(np.trace(r @ r)))
    berry = -t / 4.0 if purity >= 1.0 - 1e-8 else None
    return AttainabilityReport(
        t_matrix=t,
        attainable=bool(np.max(np.abs(t)) < tol) if n > 1 else True,
        tolerance=tol,
        berry_curvature=berry,
    )


@dataclass(frozen=True)
class CrbReport:
    """Multiparameter Cramer-Rao bound quantities for ``n`` repetitions.

    ``inverse`` is ``F^-1`` (pseudo-inverse when singular); ``trace_inverse``
    is ``Tr(F^-1)/n``; ``diagonal_bound_sum`` is ``sum_a 1/(n F_aa)``, the
    weaker bound on the total variance; ``effective_fisher`` is
    ``det F / Tr F`` in the two-parameter case.
    """

    qfim: QfimMatrix
    inverse: np.ndarray
    trace_inverse: float
    diagonal_bound_sum: float
    effective_fisher: float | None
    singular: bool
    n: int
    infinite_directions: tuple = ()


def crb_report(f: QfimMatrix, n: int = 1) -> CrbReport:
    """Bound report from a QFIM: inverse, total-variance bounds, flags."""
    if n < 1:
        raise DomainError(f"repetitions must be >= 1, got {n}")
    pinv = pseudo_inverse(f.matrix, tol=1e-12)
    singular = pinv.rank < f.n_params
    inverse = np.real(pinv.matrix)
    diag = np.diagonal(f.matrix)
    infinite = tuple(int(a) for a in np.flatnonzero(diag <= 0.0))
    with np.errstate(divide="ignore"):
        diag_bound = float(np.sum(np.where(diag > 0.0, 1.0 / (n * diag), np.inf)))
    eff = None
    if f.n_params == 2:
        tr = float(np.trace(f.matrix))
        eff = float(np.linalg.det(f.matrix)) / tr if tr > 0 else 0.0
    return CrbReport(
        qfim=f,
        inverse=inverse,
        trace_inverse=float(np.trace(inverse)) / n,
        diagonal_bound_sum=diag_bound,
        effective_fisher=eff,
        singular=singular,
        n=n,
        infinite_directions=infinite,
    )
