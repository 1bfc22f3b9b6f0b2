"""Problem geometries, conformal maps and point validation.

Three settings are supported:

* :class:`Annulus` -- data on the circle ``|zeta| = r`` inside ``rho < |zeta| < 1``.
* :class:`HalfPlaneGeometry` -- data on the circle ``|zeta - i| = r`` in the
  upper half-plane.
* :class:`BernsteinEllipse` -- data on the focal segment ``[-1, 1]`` of the
  ellipse ``E_R``; reduced to a symmetric annulus through the Joukowski map.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

from .exceptions import (
    BranchPointError,
    ConfigurationError,
    DomainError,
    NearDegenerateError,
)

#: Points closer than this to a data curve or domain boundary are rejected.
DEGENERACY_DISTANCE = 1e-10


def _check_real(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise ConfigurationError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Annulus:
    """Annulus ``rho < |zeta| < 1`` with data circle ``|zeta| = r``."""

    rho: float
    r: float

    kind: ClassVar[str] = "annulus"

    def __post_init__(self):
        rho = _check_real("rho", self.rho)
        r = _check_real("r", self.r)
        if not 0.0 < rho < r < 1.0:
            raise ConfigurationError(
                f"annulus requires 0 < rho < r < 1, got rho={rho!r}, r={r!r}"
            )
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "r", r)

    @property
    def is_symmetric(self) -> bool:
        """True when ``r**2 == rho``, the case reached from a Bernstein ellipse."""
        return math.isclose(self.r * self.r, self.rho, rel_tol=1e-12)

    def to_dict(self):
        return {"kind": self.kind, "rho": self.rho, "r": self.r}


@dataclass(frozen=True)
class HalfPlaneGeometry:
    """Upper half-plane with data circle of radius ``r`` centred at ``i``.

    The Moebius map ``m(zeta) = (zeta - z0) / (zeta + z0)`` with
    ``z0 = i*sqrt(1 - r**2)`` sends the half-plane to the unit disk and the
    data circle to the concentric circle of radius :attr:`rho`.
    """

    r: float

    kind: ClassVar[str] = "halfplane"

    def __post_init__(self):
        r = _check_real("r", self.r)
        if not 0.0 < r < 1.0:
            raise ConfigurationError(f"half-plane circle requires 0 < r < 1, got r={r!r}")
        object.__setattr__(self, "r", r)

    @property
    def z0(self) -> complex:
        return 1j * math.sqrt(1.0 - self.r * self.r)

    @property
    def rho(self) -> float:
        # r / (1 + sqrt(1 - r^2)) equals (1 - sqrt(1 - r^2)) / r without the cancellation
        return self.r / (1.0 + math.sqrt(1.0 - self.r * self.r))

    def to_dict(self):
        return {"kind": self.kind, "r": self.r}


@dataclass(frozen=True)
class BernsteinEllipse:
    """Ellipse with foci ``+-1`` and semi-axis sum ``R``; data on ``[-1, 1]``."""

    R: float

    kind: ClassVar[str] = "ellipse"

    def __post_init__(self):
        R = _check_real("R", self.R)
        if not R > 1.0:
            raise ConfigurationError(f"Bernstein ellipse requires R > 1, got R={R!r}")
        object.__setattr__(self, "R", R)

    @property
    def annulus_view(self) -> Annulus:
        """Symmetric annulus ``rho = R**-2``, ``r = R**-1`` (with ``r*r == rho`` exactly)."""
        r = 1.0 / self.R
        return Annulus(rho=r * r, r=r)

    def to_dict(self):
        return {"kind": self.kind, "R": self.R}


Geometry = Union[Annulus, HalfPlaneGeometry, BernsteinEllipse]


def joukowski(w):
    """Joukowski map ``(w + 1/w) / 2``; works elementwise on arrays."""
    w_arr = np.asarray(w)
    if np.any(w_arr == 0):
        raise DomainError("joukowski map is undefined at w = 0")
    out = 0.5 * (w_arr + 1.0 / w_arr)
    return out[()] if out.ndim == 0 else out


def _distance_to_segment(z: complex) -> float:
    x = min(max(z.real, -1.0), 1.0)
    return abs(z - x)


def inverse_joukowski(z, R: float) -> complex:
    """Branch of the inverse Joukowski map with ``1 < |w| < R``.

    The two roots of ``w**2 - 2 z w + 1 = 0`` multiply to one, so exactly one
    lies outside the unit circle unless ``z`` is on the cut ``[-1, 1]``.

    Raises
    ------
    BranchPointError
        If ``z`` lies on ``[-1, 1]``.
    NearDegenerateError
        If ``z`` is within :data:`DEGENERACY_DISTANCE` of the cut or of the
        ellipse boundary.
    DomainError
        If ``z`` is outside the closed ellipse ``E_R``.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"point must be finite, got {z!r}")
    if z.imag == 0.0 and abs(z.real) <= 1.0:
        raise BranchPointError(f"z={z!r} lies on the cut [-1, 1]")
    if _distance_to_segment(z) < DEGENERACY_DISTANCE:
        raise NearDegenerateError(f"z={z!r} is within {DEGENERACY_DISTANCE:g} of [-1, 1]")
    s = cmath.sqrt(z * z - 1.0)
    # add the square root in the direction of z to avoid cancellation
    if (z.conjugate() * s).real < 0.0:
        s = -s
    w = z + s
    modulus = abs(w)
    if modulus >= R:
        raise DomainError(f"z={z!r} lies outside the Bernstein ellipse with R={R!r}")
    if R - modulus < DEGENERACY_DISTANCE:
        raise NearDegenerateError(f"z={z!r} is within {DEGENERACY_DISTANCE:g} of the ellipse boundary")
    return w


def inverse_joukowski_radical(z) -> complex:
    """Nested-radical form ``z + (z - 1) sqrt((z + 1)/(z - 1))`` with principal roots.

    Kept as an independent cross-check of :func:`inverse_joukowski`; it picks
    the same branch everywhere off ``[-1, 1]``.
    """
    z = complex(z)
    return z + (z - 1.0) * cmath.sqrt((z + 1.0) / (z - 1.0))


def mobius(zeta, g: HalfPlaneGeometry):
    """Moebius map ``(zeta - z0) / (zeta + z0)`` of the half-plane geometry.

    Works elementwise on arrays. Points must lie in the closed upper half-plane.
    """
    zeta_arr = np.asarray(zeta, dtype=complex)
    if np.any(zeta_arr.imag < 0.0):
        raise DomainError("mobius map is applied to points with Im(zeta) >= 0 only")
    z0 = g.z0
    out = (zeta_arr - z0) / (zeta_arr + z0)
    return out[()] if out.ndim == 0 else out


def ellipse_point_to_annulus(z, e: BernsteinEllipse) -> complex:
    """Point ``z_a`` of the annulus view with ``J(R z_a) = z`` and ``|z_a| > 1/R``."""
    return inverse_joukowski(z, e.R) / e.R


def check_point(geometry: Geometry, z) -> complex:
    """Validate an evaluation point for ``geometry`` and return it as ``complex``.

    The point must lie in the open domain, off the data curve, and at least
    :data:`DEGENERACY_DISTANCE` away from both.
    """
    try:
        z = complex(z)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"cannot interpret {z!r} as a complex number") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"point must be finite, got {z!r}")

    if isinstance(geometry, Annulus):
        mod = abs(z)
        if not geometry.rho < mod < 1.0:
            raise DomainError(
                f"z={z!r} violates rho < |z| < 1 (rho={geometry.rho!r}, |z|={mod!r})"
            )
        if min(mod - geometry.rho, 1.0 - mod) < DEGENERACY_DISTANCE:
            raise NearDegenerateError(f"z={z!r} is too close to the annulus boundary")
        if abs(mod - geometry.r) < DEGENERACY_DISTANCE:
            raise NearDegenerateError(f"z={z!r} is on or too close to the data circle |z| = {geometry.r!r}")
        return z

    if isinstance(geometry, HalfPlaneGeometry):
        if not z.imag > 0.0:
            raise DomainError(f"z={z!r} violates Im(z) > 0")
        if z.imag < DEGENERACY_DISTANCE:
            raise NearDegenerateError(f"z={z!r} is too close to the real axis")
        if abs(abs(z - 1j) - geometry.r) < DEGENERACY_DISTANCE:
            raise NearDegenerateError(
                f"z={z!r} is on or too close to the data circle |z - i| = {geometry.r!r}"
            )
        return z

    if isinstance(geometry, BernsteinEllipse):
        inverse_joukowski(z, geometry.R)
        return z

    raise TypeError(f"unsupported geometry {geometry!r}")


@dataclass(frozen=True)
class EvaluationPoint:
    """A point validated against its geometry; converts to ``complex``."""

    geometry: Geometry
    z: complex

    def __post_init__(self):
        object.__setattr__(self, "z", check_point(self.geometry, self.z))

    def __complex__(self):
        return self.z
