"""Ball-constrained logistic regression under the Gaussian-covariate probit model.

The package fits the constrained estimator, provides exact population
oracles for its target, calibrates the noise level against the target
length, decides linear separability with certificates, checks a catalogue
of Gaussian moment inequalities, and reproduces the two-regime
convergence rates in Monte Carlo.
"""

from .bounds import BoundReport, check_bounds, default_grid, identity_grid, lemma_ids
from .estimator import (
    BallLogisticRegression,
    DegenerateFitError,
    FitConfig,
    FitResult,
    SolverError,
    bounded_term,
    decompose,
    fit,
    logistic_loss,
    loss_gradient,
    unbounded_term,
)
from .experiments import (
    Cell,
    CellStats,
    ExperimentGrid,
    ExperimentReport,
    RateSlope,
    RegimeTag,
    cell_stats,
    classify_regime,
    default_radius,
    rate_slope,
    run_grid,
)
from .geometry import (
    HFrame,
    StarGeometry,
    angle_disagreement,
    disagreement_moment,
    h_coordinates,
    wrong_label_prob,
)
from .model import (
    CURVATURE_THRESHOLD,
    Dataset,
    ModelSpec,
    SeedSpec,
    margin_check,
    population_excess_unbounded,
    population_hessian,
    population_risk,
    population_risk_h,
    population_unbounded_mean,
    sample,
)
from .quadrature import (
    CalibrationError,
    QuadratureError,
    QuadratureRule,
    exp_abs_moment,
    expect_abs,
    half_line_rule,
    link_value,
    sigma_to_tau_star,
    tau_star_to_sigma,
)
from .separability import (
    SeparabilityUndecided,
    SeparabilityVerdict,
    cover_probability,
    is_separable,
)

__version__ = "0.1.0"

__all__ = [
    "BallLogisticRegression",
    "BoundReport",
    "CalibrationError",
    "Cell",
    "CellStats",
    "CURVATURE_THRESHOLD",
    "Dataset",
    "DegenerateFitError",
    "ExperimentGrid",
    "ExperimentReport",
    "FitConfig",
    "FitResult",
    "HFrame",
    "ModelSpec",
    "QuadratureError",
    "QuadratureRule",
    "RateSlope",
    "RegimeTag",
    "SeedSpec",
    "SeparabilityUndecided",
    "SeparabilityVerdict",
    "SolverError",
    "StarGeometry",
    "angle_disagreement",
    "bounded_term",
    "cell_stats",
    "check_bounds",
    "classify_regime",
    "cover_probability",
    "decompose",
    "default_grid",
    "default_radius",
    "disagreement_moment",
    "exp_abs_moment",
    "expect_abs",
    "fit",
    "h_coordinates",
    "half_line_rule",
    "identity_grid",
    "is_separable",
    "lemma_ids",
    "link_value",
    "logistic_loss",
    "loss_gradient",
    "margin_check",
    "population_excess_unbounded",
    "population_hessian",
    "population_risk",
    "population_risk_h",
    "population_unbounded_mean",
    "rate_slope",
    "run_grid",
    "sample",
    "sigma_to_tau_star",
    "tau_star_to_sigma",
    "unbounded_term",
    "wrong_label_prob",
]
