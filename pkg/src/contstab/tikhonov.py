"""Closed-form solution of ``(K + eps**2) u = p_z`` and the quantities built on it.

In the eigenbasis of ``K`` the regularized equation diagonalizes::

    u(zeta) = sum_n conj(e_n(z)) / (lambda_n + eps**2) * e_n(zeta)

and the value ``u(z)`` together with the norms ``||u||`` (global) and
``||u||_Gamma`` (on the data curve) are plain weighted sums of ``|e_n(z)|**2``.
They give the optimal bound ``|f(z)| <= 3/2 u(z) min(1/||u||, eps/||u||_Gamma)``
for every ``f`` with ``||f|| <= 1`` and ``||f||_Gamma <= eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._series import collect_terms
from .chebyshev import chebyshev_t, chebyshev_table
from .exceptions import DomainError, NumericalError
from .geometry import (
    Annulus,
    BernsteinEllipse,
    HalfPlaneGeometry,
    check_point,
    ellipse_point_to_annulus,
    inverse_joukowski,
    mobius,
)
from .spectral import (
    AnnulusBasis,
    HalfPlaneBasis,
    SpectralBasis,
    SymmetricAnnulusBasis,
    basis_for,
)

#: Smallest supported regularization; below it lambda_n/(lambda_n + eps**2)
#: carries no correct digits near the switchover index.
EPS_FLOOR = 1e-12
DEFAULT_TOL = 1e-12


def _check_eps(eps):
    eps = float(eps)
    if not (math.isfinite(eps) and eps > 0.0):
        raise DomainError(f"eps must be a positive finite number, got {eps!r}")
    if eps < EPS_FLOOR:
        raise DomainError(f"eps={eps!r} is below the double-precision floor {EPS_FLOOR:g}")
    return eps


def _check_tol(tol):
    tol = float(tol)
    if not (math.isfinite(tol) and tol > 0.0):
        raise DomainError(f"tol must be positive, got {tol!r}")
    return tol


def resolve(geometry, z):
    """Return ``(basis, point)`` in the coordinates the closed form works in.

    An ellipse is handled on its symmetric annulus view, with ``z`` mapped to
    ``z_a = J^{-1}(z) / R``.
    """
    if isinstance(geometry, BernsteinEllipse):
        return SymmetricAnnulusBasis(geometry.annulus_view), ellipse_point_to_annulus(z, geometry)
    basis = basis_for(geometry)
    return basis, basis.check_point(z)


def _branch_terms(basis, term, tol):
    """Collect ``term`` over every branch; indices come back in ascending order."""
    ns, vs = [], []
    for start, step in basis.branches:
        n, v = collect_terms(term, start, step, tol)
        if step < 0:
            n, v = n[::-1], v[::-1]
        ns.append(n)
        vs.append(v)
    order = np.argsort([n[0] if n.size else 0 for n in ns])
    return (np.concatenate([ns[i] for i in order]),
            np.concatenate([vs[i] for i in order], axis=0))


@dataclass(frozen=True)
class SpectralSums:
    """Truncated data ``lambda_n``, ``e_n(z)`` and the three weighted sums for one shift."""

    indices: np.ndarray
    eigenvalues: np.ndarray
    values_at_z: np.ndarray
    shift: float
    value: float          # sum |e_n|^2 / (lambda_n + shift)
    norm_h_sq: float      # sum |e_n|^2 / (lambda_n + shift)^2
    norm_gamma_sq: float  # sum lambda_n |e_n|^2 / (lambda_n + shift)^2


def spectral_sums(basis: SpectralBasis, z: complex, shift: float, tol=DEFAULT_TOL) -> SpectralSums:
    def term(n):
        lam = basis.eigenvalue(n)
        a = np.abs(basis.eigenfunction(n, z)) ** 2
        d = lam + shift
        return np.stack([a / d, a / (d * d)], axis=1)

    n, _ = _branch_terms(basis, term, tol)
    lam = basis.eigenvalue(n)
    ez = basis.eigenfunction(n, z)
    a = np.abs(ez) ** 2
    d = lam + shift
    sums = SpectralSums(
        indices=n,
        eigenvalues=lam,
        values_at_z=ez,
        shift=shift,
        value=math.fsum(a / d),
        norm_h_sq=math.fsum(a / (d * d)),
        norm_gamma_sq=math.fsum(lam * a / (d * d)),
    )
    if not all(map(math.isfinite, (sums.value, sums.norm_h_sq, sums.norm_gamma_sq))):
        raise NumericalError("spectral sums overflowed")
    return sums


def _check_series_region(basis, z, zeta):
    """Reject points where ``sum c_n e_n(zeta)`` with ``c_n ~ conj(e_n(z))`` diverges."""
    zeta = np.asarray(zeta, dtype=complex)
    if isinstance(basis, (AnnulusBasis, SymmetricAnnulusBasis)):
        rho = basis.geometry.rho
        mod = np.abs(zeta)
        ok = (mod > rho * rho / abs(z)) & (mod < 1.0 / abs(z))
        region = f"{rho * rho / abs(z):.6g} < |zeta| < {1.0 / abs(z):.6g}"
    elif isinstance(basis, HalfPlaneBasis):
        z0 = basis.geometry.z0
        mz = abs((z - z0) / (z + z0))
        with np.errstate(divide="ignore", invalid="ignore"):
            ok = (zeta != -z0) & (np.abs((zeta - z0) / (zeta + z0)) * mz < 1.0)
        region = "|m(zeta) m(z)| < 1"
    else:
        return zeta
    if not np.all(ok):
        raise DomainError(f"series diverges outside the region {region}")
    return zeta


def _sum_series(basis, coef, z, zeta, tol):
    zeta = _check_series_region(basis, z, zeta)
    flat = zeta.reshape(-1)

    def term(n):
        return coef(n)[:, None] * basis.eigenfunction(n[:, None], flat[None, :])

    _, values = _branch_terms(basis, term, tol)
    out = values.sum(axis=0).reshape(zeta.shape)
    if not np.all(np.isfinite(out)):
        raise NumericalError("series evaluation overflowed")
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class TikhonovSolution:
    """``u_{eps,z}`` in coefficient form together with ``u(z)``, ``||u||``, ``||u||_Gamma``.

    ``z`` is expressed in the coordinates of ``basis`` (for an ellipse: the
    annulus point ``z_a``).
    """

    basis: SpectralBasis
    z: complex
    eps: float
    tol: float
    indices: np.ndarray
    coefficients: np.ndarray
    value_at_z: float
    norm_H: float
    norm_Gamma: float

    @property
    def geometry(self):
        return self.basis.geometry

    def coefficient(self, n):
        n = np.asarray(n)
        return np.conj(self.basis.eigenfunction(n, self.z)) / (
            self.basis.eigenvalue(n) + self.eps * self.eps
        )

    def __call__(self, zeta):
        """Evaluate ``u`` at ``zeta`` (adaptive truncation per point)."""
        return _sum_series(self.basis, self.coefficient, self.z, zeta, self.tol)

    @property
    def scale(self) -> float:
        """``min(1/||u||, eps/||u||_Gamma)``: the factor turning ``u`` into the extremal function."""
        return min(1.0 / self.norm_H, self.eps / self.norm_Gamma)

    def extremal(self, zeta):
        """``u(zeta) * min(1/||u||, eps/||u||_Gamma)``, feasible and extremal at ``z``."""
        return self(zeta) * self.scale

    @property
    def extremal_value(self) -> float:
        return self.value_at_z * self.scale


def solve(geometry, z, eps, tol=DEFAULT_TOL) -> TikhonovSolution:
    """Solve ``(K + eps**2) u = p_z`` by spectral expansion.

    Parameters
    ----------
    geometry : Annulus, HalfPlaneGeometry, BernsteinEllipse or SpectralBasis
        Passing a basis (e.g. :class:`SymmetricAnnulusBasis`) selects it
        explicitly; an ellipse uses the symmetric basis of its annulus view.
    z : complex
        Evaluation point.
    eps : float
        Data-curve precision, at least :data:`EPS_FLOOR`.
    tol : float
        Truncation tolerance for the series.
    """
    eps = _check_eps(eps)
    tol = _check_tol(tol)
    basis, zb = resolve(geometry, z)
    sums = spectral_sums(basis, zb, eps * eps, tol)
    coefficients = np.conj(sums.values_at_z) / (sums.eigenvalues + eps * eps)
    return TikhonovSolution(
        basis=basis,
        z=zb,
        eps=eps,
        tol=tol,
        indices=sums.indices,
        coefficients=coefficients,
        value_at_z=sums.value,
        norm_H=math.sqrt(sums.norm_h_sq),
        norm_Gamma=math.sqrt(sums.norm_gamma_sq),
    )


@dataclass(frozen=True)
class StabilityBound:
    """The optimal bound, which branch of the minimum is active, and the power-law reading."""

    bound_value: float
    argmin_branch: str  # "norm_H" (1/||u||) or "norm_Gamma" (eps/||u||_Gamma)
    gamma_closed_form: float
    prefactor: float    # bound_value / eps**gamma
    eps: float


def bound(sol: TikhonovSolution) -> StabilityBound:
    """``3/2 u(z) min(1/||u||, eps/||u||_Gamma)``; an exact tie reports ``norm_H``."""
    first = 1.0 / sol.norm_H
    second = sol.eps / sol.norm_Gamma
    branch = "norm_H" if first <= second else "norm_Gamma"
    value = 1.5 * sol.value_at_z * min(first, second)
    gamma = exponent(sol.basis, sol.z)
    return StabilityBound(
        bound_value=value,
        argmin_branch=branch,
        gamma_closed_form=gamma,
        prefactor=value / sol.eps ** gamma,
        eps=sol.eps,
    )


def stable_region(geometry, z) -> bool:
    """True where continuation is fully stable (half-plane, inside the data circle)."""
    if isinstance(geometry, SpectralBasis):
        geometry = geometry.geometry
    if isinstance(geometry, HalfPlaneGeometry):
        z = check_point(geometry, z)
        return abs(z - 1j) < geometry.r
    check_point(geometry, z)
    return False


def exponent(geometry, z) -> float:
    """Optimal power-law exponent at ``z``.

    * annulus: ``ln|z| / ln r`` outside the data circle,
      ``ln(|z|/rho) / ln(r/rho)`` inside it;
    * half-plane: ``ln|m(z)| / ln rho``, and ``1`` inside the data circle;
    * ellipse: ``1 - ln|J^{-1}(z)| / ln R``.
    """
    if isinstance(geometry, SpectralBasis):
        geometry = geometry.geometry
    if isinstance(geometry, Annulus):
        mod = abs(check_point(geometry, z))
        if mod > geometry.r:
            return math.log(mod) / math.log(geometry.r)
        return math.log(mod / geometry.rho) / math.log(geometry.r / geometry.rho)
    if isinstance(geometry, HalfPlaneGeometry):
        z = check_point(geometry, z)
        if abs(z - 1j) < geometry.r:
            return 1.0
        return math.log(abs(mobius(z, geometry))) / math.log(geometry.rho)
    if isinstance(geometry, BernsteinEllipse):
        w = inverse_joukowski(z, geometry.R)
        return 1.0 - math.log(abs(w)) / math.log(geometry.R)
    raise TypeError(f"unsupported geometry {geometry!r}")


class Maximizer:
    """Worst-case function written as ``sum_n a_n e_n`` in an orthonormal eigenbasis.

    The norms follow from the coefficients: ``||M||**2 = sum |a_n|**2`` and
    ``||M||_Gamma**2 = sum lambda_n |a_n|**2``.
    """

    def __init__(self, basis, z, eps, gamma, coef, tol=DEFAULT_TOL):
        self.basis = basis
        self.z = z
        self.eps = eps
        self.gamma = gamma
        self.coef = coef
        self.tol = tol
        self._norms = None

    def __call__(self, zeta):
        return _sum_series(self.basis, self.coef, self.z, zeta, self.tol)

    @property
    def value_at_z(self) -> complex:
        return complex(self(self.z))

    def _norm_sums(self):
        if self._norms is None:
            basis = self.basis

            def term(n):
                a2 = np.abs(self.coef(n)) ** 2
                return np.stack([a2, basis.eigenvalue(n) * a2], axis=1)

            _, v = _branch_terms(basis, term, self.tol)
            self._norms = (math.sqrt(math.fsum(v[:, 0])), math.sqrt(math.fsum(v[:, 1])))
        return self._norms

    @property
    def norm_H(self) -> float:
        return self._norm_sums()[0]

    @property
    def norm_Gamma(self) -> float:
        return self._norm_sums()[1]

    def boundary_points(self, samples=256) -> np.ndarray:
        """Points on the boundary of the closed domain, in basis coordinates."""
        samples = int(samples)
        if samples < 8:
            raise DomainError(f"need at least 8 boundary samples, got {samples!r}")
        theta = 2.0 * math.pi * (np.arange(samples) + 0.5) / samples
        if isinstance(self.basis, HalfPlaneBasis):
            # real axis, compactified; M vanishes at infinity
            return np.tan(0.5 * theta - 0.5 * math.pi).astype(complex)
        circle = np.exp(1j * theta)
        return np.concatenate([circle, self.basis.geometry.rho * circle])

    def sup_norm(self, samples=256) -> float:
        """Sampled ``sup |M|`` over the closed domain (maximum principle: boundary only)."""
        values = Maximizer.__call__(self, self.boundary_points(samples))
        return float(np.max(np.abs(values)))


class EllipseMaximizer(Maximizer):
    """Chebyshev-series maximizer on the Bernstein ellipse.

    Called with points ``omega`` of the ellipse plane::

        M(omega) = eps**(2 - alpha) sum_{n>=1} conj(T_n(z)) T_n(omega) / (1 + eps**2 R**(2n))

    Norms are those of the same function pulled back to the symmetric annulus.
    """

    def __init__(self, ellipse, z, eps, tol=DEFAULT_TOL):
        view = ellipse.annulus_view
        basis = SymmetricAnnulusBasis(view)
        za = ellipse_point_to_annulus(z, ellipse)
        alpha = exponent(ellipse, z)
        pref = eps ** (2.0 - alpha)
        R = ellipse.R
        self.ellipse = ellipse
        self.point = complex(z)
        self._pref = pref

        def coef(n):
            # coefficient on e_n = (zeta^n + (rho/zeta)^n)/sqrt(2), written against overflow
            n = np.asarray(n)
            tz = chebyshev_table(int(n.max()), self.point)[n]
            scale = float(R) ** (-n.astype(float))
            a = pref * np.conj(tz) * scale / (math.sqrt(2.0) * (scale * scale + eps * eps))
            return np.where(n >= 1, a, 0.0)

        super().__init__(basis, za, eps, alpha, coef, tol)

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=complex)
        flat = omega.reshape(-1)
        for x in flat:
            if not (x.imag == 0.0 and abs(x.real) <= 1.0):
                inverse_joukowski(x, self.ellipse.R)
        R, eps = self.ellipse.R, self.eps

        def term(n):
            top = int(n[-1])
            tz = chebyshev_table(top, self.point)[n]
            tw = chebyshev_table(top, flat)[n]
            d = 1.0 + eps * eps * float(R) ** (2.0 * n)
            return (self._pref * np.conj(tz) / d)[:, None] * tw

        _, values = collect_terms(term, 1, 1, self.tol)
        out = values.sum(axis=0).reshape(omega.shape)
        if not np.all(np.isfinite(out)):
            raise NumericalError("Chebyshev series overflowed")
        return out[()] if out.ndim == 0 else out

    @property
    def value_at_z(self) -> complex:
        return complex(self(self.point))


def maximizer(geometry, z, eps, tol=DEFAULT_TOL) -> Maximizer:
    """Closed-form worst-case function for ``geometry`` at ``z``.

    * annulus: ``eps**(2-g) sum_{n in Z} (conj(z) zeta)**n / (r**(2n) + eps**2 (1 + rho**(2n)))``
    * half-plane: ``eps**(2-g) / (zeta + z0) sum_{n>=1} (conj(m(z)) m(zeta))**n / (eps**2 + rho**(2n))``
    * symmetric annulus basis: ``eps**(2-g) sum_{n>=1} (conj(z)**n + (rho/conj(z))**n) / (rho**n + eps**2) (zeta**n + (rho/zeta)**n)``
    * ellipse: :class:`EllipseMaximizer`.
    """
    eps = _check_eps(eps)
    tol = _check_tol(tol)
    if isinstance(geometry, BernsteinEllipse):
        return EllipseMaximizer(geometry, z, eps, tol)
    basis, zb = resolve(geometry, z)
    gamma = exponent(basis, zb)
    pref = eps ** (2.0 - gamma)
    e2 = eps * eps

    if isinstance(basis, AnnulusBasis):
        rho, r = basis.geometry.rho, basis.geometry.r
        zc = zb.conjugate()

        def coef(n):
            n = np.asarray(n)
            m = np.abs(n)
            pos = zc ** m / (r ** (2 * m) + e2 * (1.0 + rho ** (2 * m)))
            with np.errstate(divide="ignore", invalid="ignore"):
                neg = (rho / zc) ** m / ((rho / r) ** (2 * m) + e2 * (1.0 + rho ** (2 * m)))
            return pref * np.where(n >= 0, pos, neg)

    elif isinstance(basis, HalfPlaneBasis):
        g = basis.geometry
        mz = complex(mobius(zb, g)).conjugate()
        kappa = basis._scale

        def coef(n):
            n = np.asarray(n)
            a = pref * mz ** n / (kappa * (e2 + g.rho ** (2 * n)))
            return np.where(n >= 1, a, 0.0)

    elif isinstance(basis, SymmetricAnnulusBasis):
        rho = basis.geometry.rho
        zc = zb.conjugate()

        def coef(n):
            n = np.asarray(n)
            a = pref * math.sqrt(2.0) * (zc ** n + (rho / zc) ** n) / (rho ** n + e2)
            return np.where(n >= 1, a, 0.0)

    else:
        raise TypeError(f"no closed-form maximizer for {basis!r}")

    return Maximizer(basis, zb, eps, gamma, coef, tol)


@dataclass(frozen=True)
class DualCertificate:
    """Root ``eta*`` of ``Phi(eta) = eps**2`` and its ratio to ``eps**2``."""

    eta_star: float
    phi_at_eta_star: float
    ratio_eta_eps2: float
    eps: float


def phi(geometry, z, eta, tol=DEFAULT_TOL) -> float:
    """``Phi(eta) = (K (K+eta)^-1 p_z, (K+eta)^-1 p_z) / ||(K+eta)^-1 p_z||**2``; increasing in ``eta``."""
    basis, zb = resolve(geometry, z)
    return _phi(basis, zb, float(eta), tol)


def _phi(basis, zb, eta, tol):
    # Phi is a ratio, so (lambda + eta) may be rescaled freely; this keeps large eta finite
    scale = max(eta, 1.0)

    def term(n):
        lam = basis.eigenvalue(n)
        a = np.abs(basis.eigenfunction(n, zb)) ** 2
        d = (lam + eta) / scale
        w = a / (d * d)
        return np.stack([w, lam * w], axis=1)

    _, v = _branch_terms(basis, term, tol)
    den = math.fsum(v[:, 0])
    if not (den > 0.0 and math.isfinite(den)):
        raise NumericalError(f"Phi({eta:g}) is not representable in double precision")
    return math.fsum(v[:, 1]) / den


def phi_limit(geometry, z, tol=DEFAULT_TOL) -> float:
    """``Phi(+inf) = (K p_z, p_z) / ||p_z||**2``."""
    basis, zb = resolve(geometry, z)

    def term(n):
        a = np.abs(basis.eigenfunction(n, zb)) ** 2
        return np.stack([a, basis.eigenvalue(n) * a], axis=1)

    _, v = _branch_terms(basis, term, tol)
    return math.fsum(v[:, 1]) / math.fsum(v[:, 0])


def dual_certificate(geometry, z, eps, tol=DEFAULT_TOL, rtol=1e-13) -> DualCertificate:
    """Solve ``Phi(eta) = eps**2`` by bisection on ``log(eta)``."""
    eps = _check_eps(eps)
    basis, zb = resolve(geometry, z)
    target = eps * eps
    sup = phi_limit(basis, zb, tol)
    if target >= sup:
        raise DomainError(f"eps**2 = {target:g} is not below sup Phi = {sup:g}; no eta* exists")

    def f(log_eta):
        return _phi(basis, zb, math.exp(log_eta), tol) - target

    lo = hi = math.log(target)
    while f(lo) > 0.0:
        lo -= math.log(100.0)
        if lo < math.log(1e-280):
            raise NumericalError("could not bracket eta*: Phi stays above eps**2 as eta -> 0")
    while f(hi) < 0.0:
        hi += math.log(100.0)
        if hi > math.log(1e280):
            raise NumericalError("could not bracket eta*: Phi stays below eps**2")
    while hi - lo > rtol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    eta = math.exp(0.5 * (lo + hi))
    value = _phi(basis, zb, eta, tol)
    return DualCertificate(eta_star=eta, phi_at_eta_star=value, ratio_eta_eps2=eta / target, eps=eps)


def _chebyshev_degree(eps, R):
    x = math.log(1.0 / eps) / math.log(R)
    k = round(x)
    # powers of R are meant to land on their integer exponent
    if abs(x - k) > 1e-9:
        k = math.floor(x)
    return max(int(k), 0)


def demanet_townsend_poly(z, eps, R):
    """``eps * T_K(z)`` with ``K = floor(ln(1/eps) / ln R)``: the polynomial near-extremal."""
    if not R > 1.0:
        raise DomainError(f"R must exceed 1, got {R!r}")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
    return eps * chebyshev_t(_chebyshev_degree(eps, R), z)


# name used by the command-line report and the operation table
detomi_trefethen_poly = demanet_townsend_poly
