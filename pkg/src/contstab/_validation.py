"""Input coercion shared by the estimators and the command line."""

import math

import numpy as np

from .exceptions import ConfigurationError, DomainError
from .geometry import Annulus, BernsteinEllipse, HalfPlaneGeometry


def check_points(X) -> np.ndarray:
    """Points as a 1-D complex array.

    Accepts complex scalars or 1-D arrays, and real arrays of shape ``(n, 2)``
    holding ``(re, im)`` rows.
    """
    arr = np.asarray(X)
    if arr.dtype == object:
        raise DomainError("points must be numeric")
    if np.iscomplexobj(arr):
        arr = arr.reshape(-1)
    elif arr.ndim == 2 and arr.shape[1] == 2:
        arr = arr[:, 0] + 1j * arr[:, 1]
    elif arr.ndim <= 1:
        arr = arr.reshape(-1).astype(complex)
    else:
        raise DomainError(f"expected complex values or (n, 2) rows of (re, im), got shape {arr.shape}")
    if arr.size == 0:
        raise DomainError("no points given")
    if not np.all(np.isfinite(arr)):
        raise DomainError("points must be finite")
    return arr.astype(complex)


def check_eps_values(X) -> np.ndarray:
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"expected a 1-D array of eps values, got shape {arr.shape}")
    if not np.all(np.isfinite(arr) & (arr > 0)):
        raise DomainError("eps values must be positive and finite")
    return arr


def make_geometry(kind: str, rho=None, r=None, R=None):
    """Geometry object from a kind name and its parameters."""
    if kind == "annulus":
        return Annulus(rho, r)
    if kind == "halfplane":
        return HalfPlaneGeometry(r)
    if kind == "ellipse":
        return BernsteinEllipse(R)
    raise ConfigurationError(f"unknown geometry kind {kind!r} (annulus, halfplane, ellipse)")


def parse_pair(text: str, name: str):
    """``"a,b"`` -> two floats."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigurationError(f"{name} expects two comma-separated numbers, got {text!r}")
    try:
        a, b = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigurationError(f"{name}: cannot parse {text!r}") from exc
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ConfigurationError(f"{name} must be finite, got {text!r}")
    return a, b
