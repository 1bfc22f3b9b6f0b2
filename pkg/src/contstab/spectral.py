"""Reproducing kernels and closed-form eigenpairs of the restriction operator.

For each geometry the operator ``K`` (restriction to the data curve followed
by its adjoint) has an explicit orthonormal eigenbasis.  A
:class:`SpectralBasis` exposes the eigenvalues ``lambda_n`` and evaluators of
the eigenfunctions ``e_n``; indices are organised in *branches*
``(start, step)`` so that sums over ``Z`` (annulus) and over ``N`` (half-plane,
symmetric annulus) share one truncation routine.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import ConfigurationError, DomainError
from .geometry import Annulus, HalfPlaneGeometry, check_point


def kernel_annulus(zeta, tau, a: Annulus):
    """Reproducing kernel of the Hardy space on the annulus.

    ``p(zeta, tau) = 1/(1 - zeta conj(tau)) + rho**2/(zeta conj(tau) - rho**2)``,
    evaluated with numpy broadcasting.
    """
    s = np.asarray(zeta, dtype=complex) * np.conj(np.asarray(tau, dtype=complex))
    rho2 = a.rho * a.rho
    if np.any(s == 1.0) or np.any(s == rho2):
        raise DomainError("annulus kernel evaluated at a pole (zeta*conj(tau) in {1, rho**2})")
    out = 1.0 / (1.0 - s) + rho2 / (s - rho2)
    return out[()] if out.ndim == 0 else out


def kernel_halfplane(zeta, tau):
    """Reproducing kernel ``i / (2 pi (zeta - conj(tau)))`` of the half-plane Hardy space."""
    d = np.asarray(zeta, dtype=complex) - np.conj(np.asarray(tau, dtype=complex))
    if np.any(d == 0):
        raise DomainError("half-plane kernel evaluated at zeta = conj(tau)")
    out = 1j / (2.0 * np.pi * d)
    return out[()] if out.ndim == 0 else out


class SpectralBasis:
    """Eigenvalues and eigenfunctions of ``K`` for one geometry.

    Subclasses implement :meth:`eigenvalue`, :meth:`eigenfunction` and
    :meth:`kernel`; all three broadcast over their array arguments.
    """

    #: ``(start, step)`` pairs whose union is the index set.
    branches: tuple = ((0, 1),)

    def __init__(self, geometry):
        self.geometry = geometry

    def __repr__(self):
        return f"{type(self).__name__}({self.geometry!r})"

    def eigenvalue(self, n):
        raise NotImplementedError

    def eigenfunction(self, n, zeta):
        raise NotImplementedError

    def kernel(self, zeta, tau):
        raise NotImplementedError

    def indices(self, count: int) -> np.ndarray:
        """The first ``count`` indices of every branch."""
        return np.concatenate(
            [start + step * np.arange(count) for start, step in self.branches]
        )

    def check_point(self, z) -> complex:
        return check_point(self.geometry, z)


class AnnulusBasis(SpectralBasis):
    """``e_n = zeta**n`` (n >= 0), ``(zeta/rho)**n`` (n < 0); index set ``Z``."""

    branches = ((0, 1), (-1, -1))

    def eigenvalue(self, n):
        n = np.asarray(n)
        a = self.geometry
        m = np.abs(n)
        ratio = np.where(n >= 0, a.r * a.r, (a.rho / a.r) ** 2)
        return 2.0 * np.pi * a.r * ratio ** m

    def eigenfunction(self, n, zeta):
        n = np.asarray(n)
        zeta = np.asarray(zeta, dtype=complex)
        m = np.abs(n)
        # (zeta/rho)**n for n < 0 is (rho/zeta)**|n|; no overflow inside the annulus
        with np.errstate(divide="ignore", invalid="ignore"):
            base = np.where(n >= 0, zeta, self.geometry.rho / zeta)
        return base ** m

    def kernel(self, zeta, tau):
        return kernel_annulus(zeta, tau, self.geometry)


class HalfPlaneBasis(SpectralBasis):
    """``e_n = (1 - r**2)**(1/4) / sqrt(pi) * m(zeta)**n / (zeta + z0)``, ``n >= 0``.

    Eigenvalues are ``lambda_n = r rho**(2n) / (1 + sqrt(1 - r**2)) = rho**(2n+1)``.
    """

    branches = ((0, 1),)

    def __init__(self, geometry):
        super().__init__(geometry)
        g = geometry
        self._scale = (1.0 - g.r * g.r) ** 0.25 / math.sqrt(math.pi)
        self._lambda0 = g.r / (1.0 + math.sqrt(1.0 - g.r * g.r))

    def eigenvalue(self, n):
        n = np.asarray(n)
        return self._lambda0 * self.geometry.rho ** (2 * n)

    def eigenfunction(self, n, zeta):
        n = np.asarray(n)
        zeta = np.asarray(zeta, dtype=complex)
        z0 = self.geometry.z0
        m = (zeta - z0) / (zeta + z0)
        return self._scale * m ** n / (zeta + z0)

    def kernel(self, zeta, tau):
        return kernel_halfplane(zeta, tau)


class SymmetricAnnulusBasis(SpectralBasis):
    """Orthonormal eigenbasis of the subspace ``{f : f(zeta) = f(rho/zeta)}``.

    ``e_0 = 1`` and ``e_n = (zeta**n + (rho/zeta)**n) / sqrt(2)`` for ``n >= 1``,
    with ``lambda_n = 2 pi sqrt(rho) rho**n``.  Requires ``r**2 == rho``.
    """

    branches = ((0, 1),)

    def __init__(self, geometry):
        if not geometry.is_symmetric:
            raise ConfigurationError(
                f"symmetric basis requires r**2 == rho, got rho={geometry.rho!r}, r={geometry.r!r}"
            )
        super().__init__(geometry)

    def eigenvalue(self, n):
        n = np.asarray(n)
        a = self.geometry
        return 2.0 * np.pi * a.r * (a.r * a.r) ** n

    def eigenfunction(self, n, zeta):
        n = np.asarray(n)
        zeta = np.asarray(zeta, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            pair = zeta ** n + (self.geometry.rho / zeta) ** n
        return np.where(n == 0, 1.0 + 0j, pair / math.sqrt(2.0))

    def kernel(self, zeta, tau):
        zeta = np.asarray(zeta, dtype=complex)
        a = self.geometry
        return 0.5 * (kernel_annulus(zeta, tau, a) + kernel_annulus(a.rho / zeta, tau, a))


def basis_annulus(a: Annulus) -> AnnulusBasis:
    return AnnulusBasis(a)


def basis_halfplane(g: HalfPlaneGeometry) -> HalfPlaneBasis:
    return HalfPlaneBasis(g)


def basis_annulus_symmetric(a: Annulus) -> SymmetricAnnulusBasis:
    return SymmetricAnnulusBasis(a)


def basis_for(geometry) -> SpectralBasis:
    """Default basis of ``geometry`` (the symmetric one for an ellipse's annulus view)."""
    from .geometry import BernsteinEllipse

    if isinstance(geometry, SpectralBasis):
        return geometry
    if isinstance(geometry, Annulus):
        return AnnulusBasis(geometry)
    if isinstance(geometry, HalfPlaneGeometry):
        return HalfPlaneBasis(geometry)
    if isinstance(geometry, BernsteinEllipse):
        return SymmetricAnnulusBasis(geometry.annulus_view)
    raise TypeError(f"unsupported geometry {geometry!r}")


def project_symmetric(f, a: Annulus):
    """Orthogonal projection onto ``L``: ``zeta -> (f(zeta) + f(rho/zeta)) / 2``."""
    if not a.is_symmetric:
        raise ConfigurationError("projection onto L is defined for r**2 == rho only")
    rho = a.rho

    def projected(zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return 0.5 * (f(zeta) + f(rho / zeta))

    return projected


def laurent_coefficients(f, radius, count, samples=512):
    """Laurent coefficients ``f_n`` for ``|n| <= count`` by the trapezoid rule.

    ``f`` is sampled on the circle ``|zeta| = radius``; any circle inside the
    annulus of analyticity gives the same coefficients up to aliasing.
    """
    theta = 2.0 * np.pi * np.arange(samples) / samples
    values = np.asarray(f(radius * np.exp(1j * theta)), dtype=complex)
    fft = np.fft.fft(values) / samples
    n = np.arange(-count, count + 1)
    return n, fft[n % samples] / radius ** n


def annulus_inner_product(f, g, a: Annulus, count=64, samples=512, radii=None):
    """Hardy-space inner product on the annulus from Laurent coefficients.

    ``(f, g) = sum_{n>=0} f_n conj(g_n) + sum_{n<0} f_n conj(g_n) rho**(2n)``.
    Coefficients with ``n >= 0`` are read on the outer circle and those with
    ``n < 0`` on the inner one, where the weights cancel the radius powers.
    ``radii=(outer, inner)`` moves the circles inside when ``f`` or ``g`` is
    not analytic up to the boundary.  Intended for verification, not for the
    solvers.
    """
    outer, inner = (1.0, a.rho) if radii is None else radii
    n, fo = laurent_coefficients(f, outer, count, samples)
    _, go = laurent_coefficients(g, outer, count, samples)
    _, fi = laurent_coefficients(f, inner, count, samples)
    _, gi = laurent_coefficients(g, inner, count, samples)
    pos = n >= 0
    total = np.sum(fo[pos] * np.conj(go[pos]))
    total += np.sum(fi[~pos] * np.conj(gi[~pos]) * a.rho ** (2.0 * n[~pos]))
    return complex(total)
