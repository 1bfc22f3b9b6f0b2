"""Power-law sweeps in eps and log-log exponent fits."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._series import collect_terms
from .exceptions import ContinuationError, DomainError

#: Full-grid R^2 below which the largest-eps decade is dropped and the fit redone.
RETRY_R2 = 0.999


def geometric_grid(lo: float, hi: float, points: int) -> np.ndarray:
    """``points`` values from ``hi`` down to ``lo``, equally spaced in ``log``."""
    return np.geomspace(hi, lo, points)


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float
    r_squared: float
    residual_max: float
    used: np.ndarray  # boolean mask of grid points in the fit


def _line(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2, float(np.max(np.abs(resid)))


def fit_loglog(x, values, retry: bool = True) -> LogLogFit:
    """Least-squares line through ``(ln x, ln values)``.

    If ``retry`` and the full-grid ``R**2 < 0.999``, points within a decade of
    the largest ``x`` are dropped once (pre-asymptotic region).
    """
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    if x.shape != values.shape or x.size < 2:
        raise ValueError("need matching arrays with at least two points")
    if np.any(x <= 0) or np.any(values <= 0):
        raise DomainError("log-log fit needs positive data")
    lx, ly = np.log(x), np.log(values)
    used = np.ones(x.size, dtype=bool)
    slope, intercept, r2, rmax = _line(lx, ly)
    if retry and r2 < RETRY_R2:
        mask = x < x.max() / 10.0 * (1.0 + 1e-12)
        if mask.sum() >= 3:
            used = mask
            slope, intercept, r2, rmax = _line(lx[mask], ly[mask])
    return LogLogFit(slope, intercept, r2, rmax, used)


@dataclass(frozen=True)
class SweepResult:
    eps_grid: np.ndarray  # strictly decreasing
    values: np.ndarray
    fitted_slope: float
    intercept: float
    r_squared: float
    residual_max: float
    fit_mask: np.ndarray = field(repr=False)

    def ratio_envelope(self, exponent: float) -> float:
        """``max/min`` of ``values / eps**exponent``; bounded iff the power law holds two-sidedly."""
        ratio = self.values / self.eps_grid ** exponent
        return float(ratio.max() / ratio.min())


def _annotated(exc, eps):
    msg = f"at eps={eps:.17g}: {exc}"
    try:
        new = type(exc)(msg)
    except Exception:  # exotic constructor; keep the original
        return exc
    new.eps = eps
    return new


def sweep(evaluator, eps_lo: float, eps_hi: float, points: int = 11, n_jobs: int = 1) -> SweepResult:
    """Evaluate ``evaluator(eps)`` on a geometric grid and fit the log-log slope.

    Failures are re-raised with the offending ``eps`` in the message (and as
    ``exc.eps``).  Results are ordered by grid index whatever ``n_jobs`` is.
    """
    if not 0.0 < eps_lo < eps_hi < 1.0:
        raise DomainError(f"need 0 < eps_lo < eps_hi < 1, got {eps_lo!r}, {eps_hi!r}")
    if int(points) != points or points < 5:
        raise DomainError(f"need at least 5 sweep points, got {points!r}")
    grid = geometric_grid(eps_lo, eps_hi, int(points))

    def one(eps):
        try:
            return float(evaluator(float(eps)))
        except ContinuationError as exc:
            raise _annotated(exc, float(eps)) from exc

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            values = list(pool.map(one, grid))
    else:
        values = [one(e) for e in grid]
    values = np.asarray(values)
    fit = fit_loglog(grid, values)
    return SweepResult(grid, values, fit.slope, fit.intercept, fit.r_squared, fit.residual_max, fit.used)


# --- sum asymptotics --------------------------------------------------------


@dataclass(frozen=True)
class LemmaA1Report:
    """``S1 = sum b_n/(a_n+eta)`` and ``S2 = sum b_n/(a_n+eta)**2`` for ``a_n = e^(-alpha n)``, ``b_n = e^(-beta n)``."""

    alpha: float
    beta: float
    eta_grid: np.ndarray  # decreasing
    sum1_values: np.ndarray
    sum2_values: np.ndarray
    slope1: float  # expected beta/alpha - 1
    slope2: float  # expected beta/alpha - 2
    switchover_indices: np.ndarray


def switchover_index(eta: float, alpha: float) -> int:
    """``J(eta) = #{n >= 1 : e^(-alpha n) >= eta}``, by direct comparison."""
    n = 0
    while math.exp(-alpha * (n + 1)) >= eta:
        n += 1
    return n


def _sums(alpha, beta, eta):
    def term(n):
        a = np.exp(-alpha * n)
        b = np.exp(-beta * n)
        d = a + eta
        return np.stack([b / d, b / (d * d)], axis=1)

    _, v = collect_terms(term, 1, 1, 1e-16)
    return math.fsum(v[:, 0]), math.fsum(v[:, 1])


def lemma_a1(alpha: float, beta: float, eta_lo: float = 1e-10, eta_hi: float = 1e-2, points: int = 17) -> LemmaA1Report:
    """Direct summation of both sums over an ``eta`` grid, with slope fits.

    Expected slopes are ``beta/alpha - 1`` and ``beta/alpha - 2``.
    """
    alpha, beta = float(alpha), float(beta)
    if not 0.0 < beta < alpha:
        raise DomainError(f"need 0 < beta < alpha, got alpha={alpha!r}, beta={beta!r}")
    if not 0.0 < eta_lo < eta_hi < 1.0:
        raise DomainError(f"need 0 < eta_lo < eta_hi < 1, got {eta_lo!r}, {eta_hi!r}")
    grid = geometric_grid(eta_lo, eta_hi, points)
    s = np.array([_sums(alpha, beta, eta) for eta in grid])
    f1 = fit_loglog(grid, s[:, 0])
    f2 = fit_loglog(grid, s[:, 1])
    J = np.array([switchover_index(eta, alpha) for eta in grid])
    return LemmaA1Report(alpha, beta, grid, s[:, 0], s[:, 1], f1.slope, f2.slope, J)
