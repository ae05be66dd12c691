"""Optimal Bayesian measurement strategies for location-isomorphic parameters."""
from .config import DEFAULT_TOLERANCES, Tolerances
from .exceptions import *  # noqa: F401,F403
from .operators import (
    EigenSystem,
    ProjectorSet,
    as_density,
    as_hermitian,
    eigendecompose,
    project_eigenspaces,
    reconstruct,
    solve_sylvester,
)
from .special import dilog
from .maps import DistanceFunction, FMap, evaluate_distance, make_fmap, mobius
from .priors import (
    PriorDensity,
    QuadratureRule,
    check_prior_invariance,
    gauss_legendre,
    haldane_prior,
    ignorance_prior,
    integrate,
    table_prior,
    uniform_prior,
)
from .personick import (
    MomentOperators,
    PersonickSolution,
    Pom,
    StateFamily,
    build_moments,
    evaluate_pom_error,
    sld,
    sld_pom,
    solve_optimal,
)
from .blend import BlochDirection, blend_family, closed_forms, figure1_sweep, optimal_eigenstates
from .bayes import (
    PosteriorGrid,
    ShotRecord,
    adaptive_next_control,
    credible_interval,
    estimate,
    likelihoods,
    posterior_variance,
    run_protocol,
    sample_outcome,
    update_posterior,
)

__version__ = "0.1.0"
