"""Mass functions, full conditionals, moments and reparameterizations.

Count-level functions (``*_counts``) take sufficient statistics and
broadcast over numpy arrays; the graph-level functions wrap them. All mass
functions work in log space through :func:`graphmix.special.lgamma`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import xlogy

from . import _kernels
from .errors import DomainError, InconsistentCensusError, InvalidDispersionError, InvalidEdgeCountError
from .graphs import Census, Graph, GraphSpace, dyad_census, edge_counts
from .special import lgamma, log_rising

LOG_HALF = math.log(0.5)


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class BernoulliParams:
    """Homogeneous Bernoulli graph; ``delta`` may sit on [0, 1] for sampling."""

    delta: float

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise DomainError(f"delta must lie in [0, 1], got {self.delta!r}")


@dataclass(frozen=True)
class CugParams:
    edges: int


@dataclass(frozen=True)
class UmanParams:
    m: float
    a: float
    n: float

    def __post_init__(self):
        for name in ("m", "a", "n"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v!r}")
        if abs(self.m + self.a + self.n - 1.0) > 1e-12:
            raise DomainError(f"m + a + n must equal 1, got {self.m + self.a + self.n!r}")


@dataclass(frozen=True)
class BetaBernoulliParams:
    alpha: float
    beta: float

    def __post_init__(self):
        _positive("alpha", self.alpha)
        _positive("beta", self.beta)


@dataclass(frozen=True)
class DirichletCategoricalParams:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        _positive("alpha", self.alpha)
        _positive("beta", self.beta)
        _positive("gamma", self.gamma)


@dataclass(frozen=True)
class MeanDegreeParams:
    """Expected mean degree and its standard deviation."""

    mu_d: float
    sigma_d: float

    def __post_init__(self):
        _positive("mu_d", self.mu_d)
        _positive("sigma_d", self.sigma_d)


@dataclass(frozen=True)
class NonNullDegreeParams:
    """Mean non-null degree, reciprocation rate and non-null degree SD."""

    mu_nnd: float
    r: float
    sigma_nnd: float

    def __post_init__(self):
        _positive("mu_nnd", self.mu_nnd)
        _positive("sigma_nnd", self.sigma_nnd)
        if not 0.0 < self.r < 1.0:
            raise DomainError(f"r must lie in (0, 1), got {self.r!r}")

    @property
    def mu_md(self) -> float:
        """Mean mutual degree."""
        return self.r * self.mu_nnd


ModelParams = Union[
    BernoulliParams,
    CugParams,
    UmanParams,
    BetaBernoulliParams,
    DirichletCategoricalParams,
    MeanDegreeParams,
    NonNullDegreeParams,
]


# --- count-level mass functions -------------------------------------------


def bernoulli_log_pmf_counts(e, n, delta):
    return e * np.log(delta) + n * np.log1p(-delta)


def uman_log_pmf_counts(mutual, asym, null, m, a, n):
    return asym * LOG_HALF + xlogy(mutual, m) + xlogy(asym, a) + xlogy(null, n)


def beta_bernoulli_log_pmf_counts(e, e_star, alpha, beta):
    """Beta-Bernoulli log-pmf of any graph with ``e`` of ``e_star`` edges.

    Each lnGamma(count + a) - lnGamma(a) pair is evaluated as one rising
    factorial so huge alpha, beta do not cancel catastrophically.
    """
    n = e_star - e
    return log_rising(alpha, e) + log_rising(beta, n) - log_rising(alpha + beta, e_star)


def dirichlet_categorical_log_pmf_counts(mutual, asym, null, alpha, beta, gamma):
    d_star = mutual + asym + null
    return (
        asym * LOG_HALF
        + log_rising(alpha, mutual)
        + log_rising(beta, asym)
        + log_rising(gamma, null)
        - log_rising(alpha + beta + gamma, d_star)
    )


# --- graph-level mass functions -------------------------------------------


def log_pmf_bernoulli(g: Graph, p: BernoulliParams) -> float:
    if not 0.0 < p.delta < 1.0:
        raise DomainError(f"log_pmf_bernoulli needs 0 < delta < 1, got {p.delta!r}")
    e, n = edge_counts(g)
    return float(bernoulli_log_pmf_counts(e, n, p.delta))


def log_pmf_cug(g: Graph, e: int) -> float:
    """Uniform over graphs with exactly ``e`` edges; -inf off that support."""
    cap = g.space.edge_capacity
    if int(e) != e or not 0 <= e <= cap:
        raise InvalidEdgeCountError(f"edge count must be an integer in [0, {cap}], got {e!r}")
    if edge_counts(g)[0] != e:
        return -math.inf
    return -float(lgamma(cap + 1) - lgamma(e + 1) - lgamma(cap - e + 1))


def log_pmf_uman(g: Graph, p: UmanParams) -> float:
    g.space.require_dyadic("log_pmf_uman")
    mutual, asym, null = dyad_census(g)
    return float(uman_log_pmf_counts(mutual, asym, null, p.m, p.a, p.n))


def log_pmf_beta_bernoulli(g: Graph, p: BetaBernoulliParams) -> float:
    e, _ = edge_counts(g)
    return float(beta_bernoulli_log_pmf_counts(e, g.space.edge_capacity, p.alpha, p.beta))


def log_pmf_dirichlet_categorical(g: Graph, p: DirichletCategoricalParams) -> float:
    g.space.require_dyadic("log_pmf_dirichlet_categorical")
    mutual, asym, null = dyad_census(g)
    return float(dirichlet_categorical_log_pmf_counts(mutual, asym, null, p.alpha, p.beta, p.gamma))


def resolve_params(params: ModelParams, space: GraphSpace) -> ModelParams:
    """Map reparameterized families onto their base family for ``space``."""
    if isinstance(params, MeanDegreeParams):
        return params_from_mean_degree(params, space)
    if isinstance(params, NonNullDegreeParams):
        return params_from_nnd(params, space)
    return params


def log_pmf(g: Graph, params: ModelParams) -> float:
    """Dispatch on the parameter type."""
    params = resolve_params(params, g.space)
    if isinstance(params, BernoulliParams):
        return log_pmf_bernoulli(g, params)
    if isinstance(params, CugParams):
        return log_pmf_cug(g, params.edges)
    if isinstance(params, UmanParams):
        return log_pmf_uman(g, params)
    if isinstance(params, BetaBernoulliParams):
        return log_pmf_beta_bernoulli(g, params)
    if isinstance(params, DirichletCategoricalParams):
        return log_pmf_dirichlet_categorical(g, params)
    raise TypeError(f"unknown model parameters {params!r}")


# --- full conditionals ----------------------------------------------------


def cond_edge_prob_bb(e_rest: int, space: GraphSpace, p: BetaBernoulliParams) -> float:
    """Pr(Y_ij = 1 | rest) given ``e_rest`` edges among the other variables."""
    cap = space.edge_capacity
    if int(e_rest) != e_rest or not 0 <= e_rest <= cap - 1:
        raise DomainError(f"e_rest must be an integer in [0, {cap - 1}], got {e_rest!r}")
    return _kernels.bb_conditional(int(e_rest), cap, float(p.alpha), float(p.beta))


def cond_edge_prob_dc(census_rest, y_ji: int, p: DirichletCategoricalParams, space: GraphSpace | None = None) -> float:
    """Pr(Y_ij = 1 | rest) under the Dirichlet-categorical pmf.

    ``census_rest`` is the dyad census of every dyad except {i, j}. When
    ``space`` is given the census must account for exactly D* - 1 dyads.
    """
    m, a, n = (int(v) for v in census_rest)
    if min(m, a, n) < 0:
        raise InconsistentCensusError(f"negative count in census {census_rest!r}")
    if space is not None and m + a + n != space.n_dyads - 1:
        raise InconsistentCensusError(
            f"census {census_rest!r} covers {m + a + n} dyads, expected {space.n_dyads - 1}"
        )
    if y_ji not in (0, 1, True, False):
        raise DomainError(f"y_ji must be binary, got {y_ji!r}")
    return _kernels.dc_conditional(m, a, n, int(y_ji), float(p.alpha), float(p.beta), float(p.gamma))


def cond_edge_prob_dc_closed_form(census_rest, y_ji: int, p: DirichletCategoricalParams) -> float:
    """Closed-form counterpart of :func:`cond_edge_prob_dc`, in rest-of-graph counts."""
    m, a, n = census_rest
    half_a = 0.5 * (a + p.beta)
    if y_ji:
        return (m + p.alpha) / (m + p.alpha + half_a)
    return half_a / (half_a + n + p.gamma)


# --- reparameterizations ----------------------------------------------------


BOUNDARY_RTOL = 1e-12


def params_from_mean_degree(md: MeanDegreeParams, space: GraphSpace) -> BetaBernoulliParams:
    c = space.n_vertices - 1
    if not 0 < md.mu_d < c:
        raise InvalidDispersionError(f"mu_d must lie in (0, {c}), got {md.mu_d!r}")
    p = md.mu_d / c
    # a relative margin keeps the boundary itself invalid despite rounding
    if not (md.sigma_d / c) ** 2 < p * (1 - p) * (1 - BOUNDARY_RTOL):
        raise InvalidDispersionError(
            f"sigma_d={md.sigma_d!r} too large for mu_d={md.mu_d!r} with {space.n_vertices} vertices"
        )
    k = md.mu_d * c / md.sigma_d**2 * (1 - p) - 1
    return BetaBernoulliParams(p * k, (1 - p) * k)


def mean_degree_from_params(p: BetaBernoulliParams, space: GraphSpace) -> MeanDegreeParams:
    mom = moments(p, space)
    return MeanDegreeParams(mom.mean_degree, mom.sd_mean_degree)


def params_from_nnd(nn: NonNullDegreeParams, space: GraphSpace) -> DirichletCategoricalParams:
    space.require_dyadic("params_from_nnd")
    c = space.n_vertices - 1
    if not 0 < nn.mu_nnd < c:
        raise InvalidDispersionError(f"mu_nnd must lie in (0, {c}), got {nn.mu_nnd!r}")
    bound = nn.mu_nnd * (c - nn.mu_nnd)
    slack = bound - nn.sigma_nnd**2
    if not slack > bound * BOUNDARY_RTOL:
        raise InvalidDispersionError(
            f"sigma_nnd={nn.sigma_nnd!r} too large for mu_nnd={nn.mu_nnd!r} with {space.n_vertices} vertices"
        )
    q = slack / (c * nn.sigma_nnd**2)
    return DirichletCategoricalParams(
        nn.r * nn.mu_nnd * q, (1 - nn.r) * nn.mu_nnd * q, (c - nn.mu_nnd) * q
    )


def nnd_from_params(p: DirichletCategoricalParams, space: GraphSpace) -> NonNullDegreeParams:
    c = space.n_vertices - 1
    s = p.alpha + p.beta + p.gamma
    nonnull = (p.alpha + p.beta) / s
    var = (p.alpha + p.beta) * p.gamma / (s * s * (s + 1))
    return NonNullDegreeParams(c * nonnull, p.alpha / (p.alpha + p.beta), c * math.sqrt(var))


# --- moments ----------------------------------------------------------------


@dataclass(frozen=True)
class BetaBernoulliMoments:
    mean_density: float
    var_density: float
    mean_degree: float
    sd_mean_degree: float


@dataclass(frozen=True)
class DirichletCategoricalMoments:
    mean_m: float
    mean_a: float
    mean_n: float
    mean_density: float
    reciprocation_rate: float


@dataclass(frozen=True)
class UmanMoments:
    density: float
    edgewise_reciprocity: float | None


@dataclass(frozen=True)
class BernoulliMoments:
    density: float
    mean_degree: float


def moments(params: ModelParams, space: GraphSpace):
    c = space.n_vertices - 1
    params = resolve_params(params, space)
    if isinstance(params, BetaBernoulliParams):
        s = params.alpha + params.beta
        mean = params.alpha / s
        var = params.alpha * params.beta / (s * s * (s + 1))
        return BetaBernoulliMoments(mean, var, c * mean, c * math.sqrt(var))
    if isinstance(params, DirichletCategoricalParams):
        s = params.alpha + params.beta + params.gamma
        m, a, n = params.alpha / s, params.beta / s, params.gamma / s
        return DirichletCategoricalMoments(m, a, n, m + a / 2, params.alpha / (params.alpha + params.beta))
    if isinstance(params, UmanParams):
        denom = 2 * params.m + params.a
        return UmanMoments(params.m + params.a / 2, 2 * params.m / denom if denom > 0 else None)
    if isinstance(params, BernoulliParams):
        return BernoulliMoments(params.delta, c * params.delta)
    raise TypeError(f"no moments for {params!r}")


def census_without_dyad(g: Graph, i: int, j: int) -> Census:
    """Dyad census of ``g`` with dyad {i, j} removed."""
    m, a, n = dyad_census(g)
    s = int(g.adjacency[i, j]) + int(g.adjacency[j, i])
    if s == 2:
        m -= 1
    elif s == 1:
        a -= 1
    else:
        n -= 1
    return Census(m, a, n)
