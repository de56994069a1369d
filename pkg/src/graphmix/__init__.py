"""Beta-Bernoulli and Dirichlet-categorical mixture models for random graphs."""

from .errors import GraphmixError
from .fitting import FitConfig, FitResult, GraphSet, fit_mle, model_comparison, pooled_loglik
from .graphs import Census, GliRecord, Graph, GraphSpace, dyad_census, edge_counts, gli
from .models import (
    BernoulliParams,
    BetaBernoulliParams,
    CugParams,
    DirichletCategoricalParams,
    MeanDegreeParams,
    NonNullDegreeParams,
    UmanParams,
    log_pmf,
)
from .netinf import (
    ErrorModel,
    ExperimentDesign,
    GibbsConfig,
    ObservationSet,
    posterior_gibbs,
    run_experiment,
    simulate_css,
)
from .samplers import make_rng

__version__ = "0.1.0"

__all__ = [
    "BernoulliParams",
    "BetaBernoulliParams",
    "Census",
    "CugParams",
    "DirichletCategoricalParams",
    "ErrorModel",
    "ExperimentDesign",
    "FitConfig",
    "FitResult",
    "GibbsConfig",
    "GliRecord",
    "Graph",
    "GraphSet",
    "GraphSpace",
    "GraphmixError",
    "MeanDegreeParams",
    "NonNullDegreeParams",
    "ObservationSet",
    "UmanParams",
    "dyad_census",
    "edge_counts",
    "fit_mle",
    "gli",
    "log_pmf",
    "make_rng",
    "model_comparison",
    "pooled_loglik",
    "posterior_gibbs",
    "run_experiment",
    "simulate_css",
]
