"""scikit-learn style wrappers around the solvers.

The estimators carry configuration only; ``fit`` builds the geometry (and for
:class:`NystromSolver` the discretized operator), ``transform``/``predict``
evaluate at points supplied as complex values or ``(re, im)`` rows.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import nystrom, tikhonov
from ._validation import check_eps_values, check_points, make_geometry
from .powerlaw import fit_loglog


class StabilityEstimator(TransformerMixin, BaseEstimator):
    """Optimal stability quantities at a fixed precision ``eps``.

    ``transform`` returns one row per point with columns
    ``[gamma, u_at_z, norm_H, norm_Gamma, bound]``; ``predict`` returns the bound.

    Examples
    --------
    >>> est = StabilityEstimator(eps=1e-6).fit()
    >>> float(est.predict([0.75])[0]) > 0
    True
    """

    columns = ("gamma", "u_at_z", "norm_H", "norm_Gamma", "bound")

    def __init__(self, geometry="annulus", rho=0.25, r=0.5, R=2.0, eps=1e-4, tol=1e-12):
        self.geometry = geometry
        self.rho = rho
        self.r = r
        self.R = R
        self.eps = eps
        self.tol = tol

    def fit(self, X=None, y=None):
        self.geometry_ = make_geometry(self.geometry, self.rho, self.r, self.R)
        tikhonov._check_eps(self.eps)
        return self

    def transform(self, X):
        check_is_fitted(self, "geometry_")
        rows = []
        for z in check_points(X):
            sol = tikhonov.solve(self.geometry_, z, self.eps, self.tol)
            b = tikhonov.bound(sol)
            rows.append([tikhonov.exponent(self.geometry_, z), sol.value_at_z,
                         sol.norm_H, sol.norm_Gamma, b.bound_value])
        return np.array(rows)

    def predict(self, X):
        return self.transform(X)[:, -1]


class PowerLawRegressor(RegressorMixin, BaseEstimator):
    """``y ~ C x**slope`` fitted on log-log axes (with the pre-asymptotic retry)."""

    def __init__(self, retry=True):
        self.retry = retry

    def fit(self, X, y):
        x = check_eps_values(X)
        fit = fit_loglog(x, np.asarray(y, dtype=float), retry=self.retry)
        self.slope_ = fit.slope
        self.intercept_ = fit.intercept
        self.r_squared_ = fit.r_squared
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "slope_")
        return np.exp(self.intercept_) * check_eps_values(X) ** self.slope_

    def score(self, X, y, sample_weight=None):
        # goodness of fit belongs on the log scale
        y = np.log(np.asarray(y, dtype=float))
        pred = np.log(self.predict(X))
        ss_res = np.sum((y - pred) ** 2)
        ss_tot = np.sum((y - y.mean()) ** 2)
        return float(1.0 - ss_res / ss_tot) if ss_tot > 0 else 1.0


class NystromSolver(TransformerMixin, BaseEstimator):
    """Quadrature solve of the regularized equation, no closed-form basis involved.

    After ``fit``: ``operator_`` and ``eigenvalues_``.  ``transform`` returns
    the numerical ``u_{eps,z}(z)`` for each point ``z``.
    """

    def __init__(self, geometry="annulus", rho=0.25, r=0.5, R=2.0, nodes=256, eps=1e-3,
                 spectrum_method="dense"):
        self.geometry = geometry
        self.rho = rho
        self.r = r
        self.R = R
        self.nodes = nodes
        self.eps = eps
        self.spectrum_method = spectrum_method

    def fit(self, X=None, y=None):
        geom = make_geometry(self.geometry, self.rho, self.r, self.R)
        self.operator_ = nystrom.build(geom, self.nodes)
        self.eigenvalues_ = nystrom.spectrum(self.operator_, self.spectrum_method).eigenvalues
        return self

    def transform(self, X):
        check_is_fitted(self, "operator_")
        out = []
        for z in check_points(X):
            sol = nystrom.solve_numeric(self.operator_, z, self.eps)
            out.append(sol(sol.z).real)
        return np.array(out)
