"""Optimal stability estimates for analytic continuation from a curve.

Closed-form spectral solutions on the annulus, the upper half-plane and the
Bernstein ellipse, an independent Nyström discretization, and power-law
sweep tooling.
"""

from .estimators import NystromSolver, PowerLawRegressor, StabilityEstimator
from .exceptions import (
    BranchPointError,
    ConditioningError,
    ConfigurationError,
    ContinuationError,
    DomainError,
    NearDegenerateError,
    NumericalError,
    ResolutionError,
)
from .geometry import (
    Annulus,
    BernsteinEllipse,
    EvaluationPoint,
    HalfPlaneGeometry,
    check_point,
    ellipse_point_to_annulus,
    inverse_joukowski,
    joukowski,
    mobius,
)
from .nystrom import (
    BranchRates,
    NumericalSpectrum,
    NystromOperator,
    annulus_branch_rates,
    build,
    parfenov_rate,
    solve_numeric,
    spectrum,
)
from .powerlaw import LemmaA1Report, SweepResult, fit_loglog, lemma_a1, sweep
from .spectral import (
    AnnulusBasis,
    HalfPlaneBasis,
    SymmetricAnnulusBasis,
    basis_annulus,
    basis_annulus_symmetric,
    basis_for,
    basis_halfplane,
    project_symmetric,
)
from .tikhonov import (
    DualCertificate,
    StabilityBound,
    TikhonovSolution,
    bound,
    demanet_townsend_poly,
    dual_certificate,
    exponent,
    maximizer,
    solve,
    stable_region,
)

__version__ = "0.1.0"

__all__ = [
    "Annulus", "BernsteinEllipse", "EvaluationPoint", "HalfPlaneGeometry", "check_point", "ellipse_point_to_annulus",
    "inverse_joukowski", "joukowski", "mobius",
    "AnnulusBasis", "HalfPlaneBasis", "SymmetricAnnulusBasis", "basis_annulus", "basis_annulus_symmetric",
    "basis_for", "basis_halfplane", "project_symmetric",
    "TikhonovSolution", "StabilityBound", "DualCertificate", "solve", "bound", "exponent", "stable_region",
    "maximizer", "dual_certificate", "demanet_townsend_poly",
    "NystromOperator", "NumericalSpectrum", "build", "spectrum", "parfenov_rate", "solve_numeric",
    "BranchRates", "annulus_branch_rates",
    "SweepResult", "LemmaA1Report", "sweep", "fit_loglog", "lemma_a1",
    "StabilityEstimator", "PowerLawRegressor", "NystromSolver",
    "ContinuationError", "DomainError", "ConfigurationError", "NearDegenerateError", "BranchPointError",
    "NumericalError", "ResolutionError", "ConditioningError",
]
