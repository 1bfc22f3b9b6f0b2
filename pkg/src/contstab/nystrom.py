"""Nyström discretization of the restriction operator on a circular data curve.

``(K f)(zeta) = int_Gamma p(zeta, tau) f(tau) |dtau|`` is replaced by the
trapezoid rule on ``M`` equispaced nodes.  Nothing here uses the closed-form
eigenbasis; the module exists to check it independently.

Two eigenvalue paths are offered by :func:`spectrum`:

``"dense"``
    ``numpy.linalg.eigvalsh`` on the Hermitian matrix.  Absolute accuracy
    ``~eps_mach * mu_1``, so only the top few eigenvalues have small relative
    error.
``"accurate"``
    Pivoted Cholesky of the kernel matrix in 128-bit arithmetic (gmpy2),
    followed by one-sided Jacobi on the double-precision factor.  Every
    returned eigenvalue has relative error near machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
import numpy as np

from .exceptions import ConditioningError, ConfigurationError, DomainError, ResolutionError
from .geometry import Annulus, BernsteinEllipse, HalfPlaneGeometry, check_point, ellipse_point_to_annulus
from .linalg import jacobi_singular_values
from .spectral import kernel_annulus, kernel_halfplane

NOISE_FACTOR = 1e3
#: Conditioning floor of ``A + eps**2 I`` for :func:`solve_numeric`.
MIN_EPS = 1e-6
#: Working precision (bits) and relative trace cut-off of the accurate path.
MP_PRECISION = 128
CHOLESKY_CUTOFF = 1e-30


@dataclass(frozen=True, eq=False)
class NystromOperator:
    """Trapezoid discretization of ``K`` on a circle ``|tau - center| = radius``.

    With uniform weights ``D^(1/2) A D^(-1/2) = A``, so :attr:`matrix` is already
    the Hermitian symmetrized matrix.
    """

    geometry: object
    kernel_geometry: object  # Annulus or HalfPlaneGeometry the kernel lives on
    symmetric: bool          # kernel projected onto {f(zeta) = f(rho/zeta)}
    center: complex
    radius: float
    nodes: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray

    @property
    def size(self) -> int:
        return self.nodes.size

    def kernel(self, zeta, tau):
        g = self.kernel_geometry
        if isinstance(g, HalfPlaneGeometry):
            return kernel_halfplane(zeta, tau)
        if self.symmetric:
            zeta = np.asarray(zeta, dtype=complex)
            return 0.5 * (kernel_annulus(zeta, tau, g) + kernel_annulus(g.rho / zeta, tau, g))
        return kernel_annulus(zeta, tau, g)

    def to_dict(self):
        return {"geometry": self.geometry.to_dict(), "nodes": self.size, "symmetric": self.symmetric}


def _circle(geometry):
    if isinstance(geometry, Annulus):
        return geometry, False, 0j, geometry.r
    if isinstance(geometry, HalfPlaneGeometry):
        return geometry, False, 1j, geometry.r
    if isinstance(geometry, BernsteinEllipse):
        view = geometry.annulus_view
        return view, True, 0j, view.r
    raise ConfigurationError(f"no circular data curve for {geometry!r}")


def build(geometry, M: int = 256) -> NystromOperator:
    """Assemble ``A_jk = w p(tau_j, tau_k)`` on ``M`` equispaced nodes.

    An ellipse is discretized on the data circle of its annulus view with the
    kernel of the symmetric subspace.
    """
    if isinstance(M, bool) or int(M) != M or M < 16 or M % 2:
        raise ConfigurationError(f"node count must be an even integer >= 16, got {M!r}")
    M = int(M)
    kgeom, symmetric, center, radius = _circle(geometry)
    theta = 2.0 * np.pi * np.arange(M) / M
    nodes = center + radius * np.exp(1j * theta)
    w = 2.0 * np.pi * radius / M
    weights = np.full(M, w)
    op = NystromOperator(geometry, kgeom, symmetric, center, radius, nodes, weights, None)
    matrix = w * op.kernel(nodes[:, None], nodes[None, :])
    matrix.setflags(write=False)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    object.__setattr__(op, "matrix", matrix)
    return op


def apply(op: NystromOperator, values, zeta):
    """Quadrature ``(K f)(zeta) = sum_k w_k p(zeta, tau_k) f(tau_k)`` for grid values ``f``."""
    values = np.asarray(values, dtype=complex)
    if values.shape != (op.size,):
        raise ValueError(f"expected {op.size} grid values, got shape {values.shape}")
    zeta = np.asarray(zeta, dtype=complex)
    out = op.kernel(zeta[..., None], op.nodes) @ (op.weights * values)
    return out[()] if np.ndim(out) == 0 else out


def symmetric_projector(op: NystromOperator) -> np.ndarray:
    """Grid matrix of ``f -> (f(zeta) + f(rho/zeta)) / 2`` (needs ``r**2 == rho``).

    On the data circle ``rho/tau_j = conj(tau_j) = tau_{-j}``, so the reflection
    is the node permutation ``j -> -j mod M``.
    """
    g = op.kernel_geometry
    if not (isinstance(g, Annulus) and g.is_symmetric):
        raise ConfigurationError("the reflection rho/zeta maps the grid to itself only when r**2 == rho")
    M = op.size
    P = 0.5 * np.eye(M, dtype=complex)
    P[np.arange(M), (-np.arange(M)) % M] += 0.5
    return P


# --- spectrum ---------------------------------------------------------------


@dataclass(frozen=True)
class NumericalSpectrum:
    """Eigenvalues ``mu_1 >= mu_2 >= ...`` of the discretized operator."""

    eigenvalues: np.ndarray
    valid_count: int    # eigenvalues above the noise floor
    noise_floor: float
    slope: float        # least-squares slope of ln(mu_n) against n over the valid range
    intercept: float
    method: str


def _mp_kernel(op: NystromOperator):
    """Column evaluator and (real) diagonal of ``A`` in gmpy2 arithmetic."""
    pi = gmpy2.const_pi()
    M = op.size
    g = op.kernel_geometry
    radius = gmpy2.mpfr(op.radius)
    center = gmpy2.mpc(op.center.real, op.center.imag)
    nodes = np.array([center + radius * gmpy2.exp(gmpy2.mpc(0, 2 * pi * j / M)) for j in range(M)], dtype=object)
    conj = np.array([x.conjugate() for x in nodes], dtype=object)
    w = 2 * pi * radius / M

    if isinstance(g, HalfPlaneGeometry):
        scale = gmpy2.mpc(0, 1) * w / (2 * pi)

        def column(j):
            return scale / (nodes - conj[j])

        diagonal = scale / (nodes - conj)

    else:
        rho = gmpy2.mpfr(g.rho)
        rho2 = rho * rho

        def p(s):
            return 1 / (1 - s) + rho2 / (s - rho2)

        if op.symmetric:
            reflected = np.array([rho / x for x in nodes], dtype=object)

            def column(j):
                return (w / 2) * (p(nodes * conj[j]) + p(reflected * conj[j]))

            diagonal = (w / 2) * (p(nodes * conj) + p(reflected * conj))

        else:

            def column(j):
                return w * p(nodes * conj[j])

            diagonal = w * p(nodes * conj)

    return column, np.array([x.real for x in diagonal], dtype=object)


def _pivoted_cholesky(column, diag):
    """``A ~ L diag(d) L^H`` with greedy diagonal pivoting, stopped at :data:`CHOLESKY_CUTOFF`."""
    M = diag.size
    trace = sum(diag)
    cols, pivots = [], []
    while len(cols) < M:
        j = int(np.argmax(np.array([float(x) for x in diag])))
        dj = diag[j]
        if dj <= CHOLESKY_CUTOFF * trace:
            break
        c = column(j)
        for Lk, dk in zip(cols, pivots):
            c = c - Lk * (dk * Lk[j].conjugate())
        Lk = c / dj
        cols.append(Lk)
        pivots.append(dj)
        diag = diag - np.array([dj * (x.real * x.real + x.imag * x.imag) for x in Lk], dtype=object)
        diag[j] = gmpy2.mpfr(0)
    return cols, pivots


def _accurate_eigenvalues(op: NystromOperator) -> np.ndarray:
    with gmpy2.context(precision=MP_PRECISION):
        column, diag = _mp_kernel(op)
        cols, pivots = _pivoted_cholesky(column, diag)
        G = np.empty((op.size, len(cols)), dtype=complex)
        for k, (Lk, dk) in enumerate(zip(cols, pivots)):
            s = gmpy2.sqrt(dk)
            G[:, k] = [complex(x * s) for x in Lk]
    sigma = jacobi_singular_values(G)
    return sigma * sigma


def _fit_log(values):
    n = np.arange(values.size, dtype=float)
    slope, intercept = np.polyfit(n, np.log(values), 1)
    return float(slope), float(intercept)


def spectrum(op: NystromOperator, method: str = "accurate") -> NumericalSpectrum:
    """Eigenvalues of the discretized operator, sorted descending.

    ``method="accurate"`` returns the numerical rank of the 128-bit Cholesky
    factor (fewer than ``M`` values); ``"dense"`` returns all ``M``.
    The noise floor is ``1e3 * eps_mach * mu_1`` for both.
    """
    if method == "dense":
        if not np.all(np.isfinite(op.matrix)):
            raise ConditioningError("matrix has non-finite entries")
        try:
            mu = np.linalg.eigvalsh(op.matrix)[::-1]
        except np.linalg.LinAlgError as exc:
            raise ConditioningError(f"dense eigensolver failed: {exc}") from exc
    elif method == "accurate":
        mu = _accurate_eigenvalues(op)
    else:
        raise ConfigurationError(f"unknown spectrum method {method!r}")
    mu = np.ascontiguousarray(mu)
    floor = NOISE_FACTOR * np.finfo(float).eps * mu[0]
    above = mu > floor
    valid = int(np.argmin(above)) if not above.all() else mu.size
    slope = intercept = float("nan")
    if valid >= 2:
        slope, intercept = _fit_log(mu[:valid])
    return NumericalSpectrum(mu, valid, float(floor), slope, intercept, method)


@dataclass(frozen=True)
class ParfenovReport:
    """Geometric decay ``mu_n ~ C r**(2n+1)`` in the disk limit."""

    ratios: np.ndarray      # mu_{n+1} / mu_n over the valid range
    prefactors: np.ndarray  # mu_n / r**(2n+1)
    rho_hat: float          # exp(slope / 2)
    slope: float
    r_squared: float
    valid_count: int


def parfenov_rate(op: NystromOperator, spec: NumericalSpectrum | None = None) -> ParfenovReport:
    """Fit the eigenvalue decay of a disk proxy (annulus with ``rho <= 1e-8``)."""
    g = op.kernel_geometry
    if not (isinstance(g, Annulus) and not op.symmetric and g.rho <= 1e-8):
        raise ConfigurationError("the decay-rate fit needs a disk proxy: annulus with rho <= 1e-8")
    if spec is None:
        spec = spectrum(op)
    if spec.valid_count < 5:
        raise ResolutionError(f"only {spec.valid_count} eigenvalues above the noise floor (need 5)")
    mu = spec.eigenvalues[: spec.valid_count]
    n = np.arange(mu.size)
    slope, intercept = _fit_log(mu)
    resid = np.log(mu) - (slope * n + intercept)
    ss_tot = np.sum((np.log(mu) - np.log(mu).mean()) ** 2)
    return ParfenovReport(
        ratios=mu[1:] / mu[:-1],
        prefactors=mu / g.r ** (2 * n + 1),
        rho_hat=math.exp(slope / 2.0),
        slope=slope,
        r_squared=float(1.0 - np.sum(resid ** 2) / ss_tot),
        valid_count=spec.valid_count,
    )


@dataclass(frozen=True)
class BranchRates:
    """Observed per-branch decay of an annulus spectrum, next to the closed-form ratios.

    Reported only; no rate is asserted for the annulus proper.
    """

    outer_rate: float      # fitted mu_{n+1}/mu_n on the n >= 0 branch
    inner_rate: float      # same on the n < 0 branch
    outer_expected: float  # r**2
    inner_expected: float  # (rho/r)**2
    outer_count: int
    inner_count: int


def annulus_branch_rates(op: NystromOperator, spec: NumericalSpectrum | None = None) -> BranchRates:
    """Split the resolved eigenvalues into the two annulus branches and fit each decay.

    The ``k``-th largest computed eigenvalue takes the branch label of the
    ``k``-th largest closed-form one.  A branch with fewer than two resolved
    eigenvalues gets a NaN rate.
    """
    g = op.kernel_geometry
    if not isinstance(g, Annulus) or op.symmetric:
        raise ConfigurationError("branch rates are defined for the full annulus operator only")
    if spec is None:
        spec = spectrum(op)
    mu = spec.eigenvalues[: spec.valid_count]
    k = np.arange(mu.size)
    outer = 2.0 * np.pi * g.r * (g.r * g.r) ** k
    inner = 2.0 * np.pi * g.r * ((g.rho / g.r) ** 2) ** (k + 1)
    labels = np.concatenate([np.ones(mu.size, bool), np.zeros(mu.size, bool)])
    order = np.argsort(-np.concatenate([outer, inner]), kind="stable")
    is_outer = labels[order][: mu.size]

    def rate(values):
        return math.exp(_fit_log(values)[0]) if values.size >= 2 else float("nan")

    return BranchRates(
        outer_rate=rate(mu[is_outer]),
        inner_rate=rate(mu[~is_outer]),
        outer_expected=g.r * g.r,
        inner_expected=(g.rho / g.r) ** 2,
        outer_count=int(is_outer.sum()),
        inner_count=int((~is_outer).sum()),
    )


# --- regularized solve ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NumericSolution:
    """Grid solution of ``(A + eps**2 I) u = p_z`` and its off-grid extension."""

    op: NystromOperator
    z: complex  # in kernel coordinates (annulus point for an ellipse)
    eps: float
    grid_values: np.ndarray
    residual: float

    def __call__(self, zeta):
        """``u(zeta) = (p_z(zeta) - (K u)(zeta)) / eps**2``."""
        zeta = np.asarray(zeta, dtype=complex)
        pz = self.op.kernel(zeta, self.z)
        out = (pz - apply(self.op, self.grid_values, zeta)) / (self.eps * self.eps)
        return out[()] if np.ndim(out) == 0 else out

    @property
    def norm_gamma(self) -> float:
        """``sqrt(sum_j w_j |u(tau_j)|**2)``."""
        return float(np.sqrt(np.sum(self.op.weights * np.abs(self.grid_values) ** 2)))


def solve_numeric(op: NystromOperator, z, eps: float) -> NumericSolution:
    """Solve the regularized equation on the grid without the closed-form basis."""
    eps = float(eps)
    if not (math.isfinite(eps) and eps > 0.0):
        raise DomainError(f"eps must be positive, got {eps!r}")
    if eps < MIN_EPS:
        raise ConditioningError(
            f"eps={eps:g} is below {MIN_EPS:g}; cond(A + eps^2 I) ~ {op.matrix.real.max() / eps**2:.1e}"
        )
    if isinstance(op.geometry, BernsteinEllipse):
        zk = ellipse_point_to_annulus(z, op.geometry)
    else:
        zk = check_point(op.kernel_geometry, z)
    rhs = op.kernel(op.nodes, zk)
    lhs = op.matrix + (eps * eps) * np.eye(op.size)
    try:
        u = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"regularized system is singular: {exc}") from exc
    residual = float(np.linalg.norm(lhs @ u - rhs))
    u.setflags(write=False)
    return NumericSolution(op, zk, eps, u, residual)
