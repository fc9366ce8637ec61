"""Steering quantification for two-mode continuous-variable states."""

__version__ = "0.1.0"

from .errors import (
    DegenerateCorrelation,
    DegenerateVariance,
    InsufficientSamples,
    NoConvergence,
    NotPositiveDefinite,
    NotSymmetric,
    SingularBlock,
    SingularMarginal,
    SingularParams,
    SteeringError,
    UnphysicalMixture,
    UnphysicalState,
)
from .gaussian import (
    CovMatrix,
    LocalSymplectic,
    StandardForm,
    SymplecticParams,
    apply_local,
    cm_from_json_dict,
    cm_to_json_dict,
    local_invariants,
    swap_parties,
    symplectic_eigenvalues,
    symplectic_from_params,
    to_standard_form,
    validate_bona_fide,
)
from .measures import (
    SteeringReport,
    check_reid_criterion,
    check_wiseman,
    full_report,
    gaussian_steering_a_to_b,
    gaussian_steering_b_to_a,
    key_rate_bound,
    optimal_key_rate_bound,
    optimal_params,
    reid_product,
    schur_complement_a,
    schur_complement_b,
)
from .optimize import (
    OptimizationResult,
    estimate_steering_lower,
    minimize_reid,
    sweep_w_invariance,
)
from .sampling import (
    Basis,
    EstimatorFit,
    ProductEstimate,
    SampleBatch,
    bootstrap_products,
    empirical_min_variance,
    empirical_products,
    export_batch,
    fit_linear_estimator,
    sample,
)
from .states import (
    GaussianMixtureSpec,
    GaussianStateSpec,
    mixture_cm,
    mixture_mean,
    noisy_tmsv,
    random_cm,
    state_from_json_dict,
    state_to_json_dict,
    tmsv,
    transform_mixture,
    transform_state,
    vacuum,
)

__all__ = [name for name in dir() if not name.startswith("_")]
