"""Pooled likelihoods, gradients and maximum-likelihood fitting over graph sets.

Families are named by string:

===========================  ==========================  ============================
family                       natural parameters          optimizer scale
===========================  ==========================  ============================
``bernoulli``                delta                       closed form
``beta-bernoulli``           alpha, beta                 log (log(theta - 1) approx)
``dirichlet-categorical``    alpha, beta, gamma          log (log(theta - 1) approx)
``beta-bernoulli-meandeg``   mu_d, sigma_d               logit of feasible fractions
``dc-nnd``                   mu_nnd, r, sigma_nnd        logit of feasible fractions
===========================  ==========================  ============================
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, logit, logsumexp, xlogy

from .errors import (
    ConstraintViolationError,
    DataMismatchError,
    DomainError,
    GraphmixError,
    InvalidDispersionError,
    UnsupportedSpaceError,
    ZeroStatisticError,
)
from .graphs import Graph, dyad_census, edge_counts
from .models import (
    BernoulliParams,
    BetaBernoulliParams,
    DirichletCategoricalParams,
    MeanDegreeParams,
    ModelParams,
    NonNullDegreeParams,
    BOUNDARY_RTOL,
    bernoulli_log_pmf_counts,
    beta_bernoulli_log_pmf_counts,
    dirichlet_categorical_log_pmf_counts,
    uman_log_pmf_counts,
)
from .special import digamma, lgamma

LOG2 = math.log(2.0)

PARAM_NAMES = {
    "bernoulli": ("delta",),
    "beta-bernoulli": ("alpha", "beta"),
    "dirichlet-categorical": ("alpha", "beta", "gamma"),
    "beta-bernoulli-meandeg": ("mu_d", "sigma_d"),
    "dc-nnd": ("mu_nnd", "r", "sigma_nnd"),
}
MIN_GRAPHS = {
    "bernoulli": 1,
    "beta-bernoulli": 2,
    "dirichlet-categorical": 3,
    "beta-bernoulli-meandeg": 2,
    "dc-nnd": 3,
}
DYADIC = {"dirichlet-categorical", "dc-nnd"}
APPROX_FAMILIES = {"beta-bernoulli", "dirichlet-categorical"}


class GraphSet:
    """k >= 1 graphs sharing directedness and loop policy, possibly of different orders."""

    def __init__(self, graphs: Sequence[Graph]):
        graphs = tuple(graphs)
        if not graphs:
            raise GraphmixError("a graph set needs at least one graph")
        kinds = {(g.space.directed, g.space.loops) for g in graphs}
        if len(kinds) > 1:
            raise GraphmixError("all graphs in a set must share directedness and loop policy")
        self.graphs = graphs

    def __len__(self):
        return len(self.graphs)

    def __iter__(self):
        return iter(self.graphs)

    def __getitem__(self, i):
        return self.graphs[i]

    @property
    def directed(self) -> bool:
        return self.graphs[0].space.directed

    @property
    def loops(self) -> bool:
        return self.graphs[0].space.loops

    @cached_property
    def edges(self) -> np.ndarray:
        return np.array([edge_counts(g)[0] for g in self.graphs], dtype=np.int64)

    @cached_property
    def edge_capacity(self) -> np.ndarray:
        return np.array([g.space.edge_capacity for g in self.graphs], dtype=np.int64)

    @cached_property
    def n_vertices(self) -> np.ndarray:
        return np.array([g.space.n_vertices for g in self.graphs], dtype=np.int64)

    @cached_property
    def census(self) -> np.ndarray:
        """(k, 3) array of mutual/asymmetric/null counts."""
        return np.array([dyad_census(g) for g in self.graphs], dtype=np.int64)

    @cached_property
    def digest(self) -> str:
        h = hashlib.sha256()
        for g in self.graphs:
            h.update(repr(g.space).encode())
            h.update(np.packbits(g.adjacency).tobytes())
        return h.hexdigest()[:16]


# --- per-graph parameter maps -----------------------------------------------


def _meandeg_alpha_beta(mu, sigma, c):
    """Vectorized mean-degree map; same arithmetic as models.params_from_mean_degree."""
    c = np.asarray(c, dtype=float)
    p = mu / c
    bad = ~((mu > 0) & (mu < c) & ((sigma / c) ** 2 < p * (1 - p) * (1 - BOUNDARY_RTOL)))
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise InvalidDispersionError(
            f"(mu_d={mu!r}, sigma_d={sigma!r}) is invalid for graph {i} with {int(c[i]) + 1} vertices", index=i
        )
    k = mu * c / sigma**2 * (1 - p) - 1
    return p * k, (1 - p) * k


def _nnd_alpha_beta_gamma(mu, r, sigma, c):
    c = np.asarray(c, dtype=float)
    bound = mu * (c - mu)
    slack = bound - sigma**2
    bad = ~((mu > 0) & (mu < c) & (slack > bound * BOUNDARY_RTOL))
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise InvalidDispersionError(
            f"(mu_nnd={mu!r}, sigma_nnd={sigma!r}) is invalid for graph {i} with {int(c[i]) + 1} vertices",
            index=i,
        )
    q = slack / (c * sigma**2)
    return r * mu * q, (1 - r) * mu * q, (c - mu) * q


def _family_of(params: ModelParams) -> tuple[str, np.ndarray]:
    if isinstance(params, BernoulliParams):
        return "bernoulli", np.array([params.delta])
    if isinstance(params, BetaBernoulliParams):
        return "beta-bernoulli", np.array([params.alpha, params.beta])
    if isinstance(params, DirichletCategoricalParams):
        return "dirichlet-categorical", np.array([params.alpha, params.beta, params.gamma])
    if isinstance(params, MeanDegreeParams):
        return "beta-bernoulli-meandeg", np.array([params.mu_d, params.sigma_d])
    if isinstance(params, NonNullDegreeParams):
        return "dc-nnd", np.array([params.mu_nnd, params.r, params.sigma_nnd])
    raise TypeError(f"no pooled likelihood for {params!r}")


def _check_space(gs: GraphSet, family: str) -> None:
    if family in DYADIC and (not gs.directed or gs.loops):
        raise UnsupportedSpaceError(f"{family} needs directed, loopless graphs")


# --- exact pooled likelihood --------------------------------------------------


def _per_graph_loglik(gs: GraphSet, family: str, theta) -> np.ndarray:
    _check_space(gs, family)
    e, cap = gs.edges, gs.edge_capacity
    c = gs.n_vertices - 1
    if family == "bernoulli":
        (delta,) = theta
        if not 0 < delta < 1:
            raise DomainError(f"delta must lie in (0, 1), got {delta!r}")
        return bernoulli_log_pmf_counts(e, cap - e, delta)
    if family == "beta-bernoulli":
        a, b = theta
        BetaBernoulliParams(a, b)
        return beta_bernoulli_log_pmf_counts(e, cap, a, b)
    if family == "beta-bernoulli-meandeg":
        a, b = _meandeg_alpha_beta(theta[0], theta[1], c)
        return beta_bernoulli_log_pmf_counts(e, cap, a, b)
    cen = gs.census
    if family == "dirichlet-categorical":
        a, b, g = theta
        DirichletCategoricalParams(a, b, g)
    elif family == "dc-nnd":
        NonNullDegreeParams(*theta)
        a, b, g = _nnd_alpha_beta_gamma(theta[0], theta[1], theta[2], c)
    else:
        raise ValueError(f"unknown family {family!r}")
    return dirichlet_categorical_log_pmf_counts(cen[:, 0], cen[:, 1], cen[:, 2], a, b, g)


def pooled_loglik(gs: GraphSet, params: ModelParams) -> float:
    """Sum over graphs of the exact per-graph log-pmf."""
    family, theta = _family_of(params)
    terms = np.broadcast_to(_per_graph_loglik(gs, family, theta), (len(gs),))
    return float(sum(terms.tolist()))


def _grad_natural(gs: GraphSet, family: str, theta) -> np.ndarray:
    e, cap = gs.edges, gs.edge_capacity
    c = (gs.n_vertices - 1).astype(float)
    if family == "bernoulli":
        (delta,) = theta
        return np.array([np.sum(e / delta - (cap - e) / (1 - delta))])
    if family in ("beta-bernoulli", "beta-bernoulli-meandeg"):
        if family == "beta-bernoulli":
            a = np.full(len(gs), theta[0])
            b = np.full(len(gs), theta[1])
        else:
            a, b = _meandeg_alpha_beta(theta[0], theta[1], c)
        common = digamma(a + b) - digamma(cap + a + b)
        da = common - digamma(a) + digamma(e + a)
        db = common - digamma(b) + digamma(cap - e + b)
        if family == "beta-bernoulli":
            return np.array([da.sum(), db.sum()])
        mu, sigma = theta
        k = a + b
        dk_dmu = (c - 2 * mu) / sigma**2
        dk_dsigma = -2 * mu * (c - mu) / sigma**3
        g_mu = da * (k + mu * dk_dmu) / c + db * (-k + (c - mu) * dk_dmu) / c
        g_sigma = da * mu * dk_dsigma / c + db * (c - mu) * dk_dsigma / c
        return np.array([g_mu.sum(), g_sigma.sum()])
    cen = gs.census
    d_star = cen.sum(axis=1)
    if family == "dirichlet-categorical":
        a, b, g = (np.full(len(gs), v) for v in theta)
    else:
        a, b, g = _nnd_alpha_beta_gamma(theta[0], theta[1], theta[2], c)
    s = a + b + g
    common = digamma(s) - digamma(d_star + s)
    da = common - digamma(a) + digamma(cen[:, 0] + a)
    db = common - digamma(b) + digamma(cen[:, 1] + b)
    dg = common - digamma(g) + digamma(cen[:, 2] + g)
    if family == "dirichlet-categorical":
        return np.array([da.sum(), db.sum(), dg.sum()])
    mu, r, sigma = theta
    q = g / (c - mu)
    dq_dmu = (c - 2 * mu) / (c * sigma**2)
    dq_dsigma = -2 * mu * (c - mu) / (c * sigma**3)
    g_mu = da * r * (q + mu * dq_dmu) + db * (1 - r) * (q + mu * dq_dmu) + dg * (-q + (c - mu) * dq_dmu)
    g_r = da * mu * q - db * mu * q
    g_sigma = da * r * mu * dq_dsigma + db * (1 - r) * mu * dq_dsigma + dg * (c - mu) * dq_dsigma
    return np.array([g_mu.sum(), g_r.sum(), g_sigma.sum()])


def grad_pooled_loglik(gs: GraphSet, params: ModelParams) -> np.ndarray:
    """Analytic gradient of :func:`pooled_loglik` in the natural parameters."""
    family, theta = _family_of(params)
    _check_space(gs, family)
    _per_graph_loglik(gs, family, theta)  # domain checks
    return _grad_natural(gs, family, theta)


# --- offset approximation ------------------------------------------------------


def _approx_stats(gs: GraphSet, family: str) -> np.ndarray:
    _check_space(gs, family)
    if family == "beta-bernoulli":
        stats = np.column_stack([gs.edges, gs.edge_capacity - gs.edges])
    elif family == "dirichlet-categorical":
        stats = gs.census
    else:
        raise ValueError(f"the offset approximation is defined for {sorted(APPROX_FAMILIES)}, not {family!r}")
    if np.any(stats == 0):
        i, j = (int(v) for v in np.argwhere(stats == 0)[0])
        raise ZeroStatisticError(f"graph {i} has a zero statistic (column {j}); its log is undefined")
    return stats


def _approx_theta(params: ModelParams) -> tuple[str, np.ndarray]:
    family, theta = _family_of(params)
    if family == "beta-bernoulli" and np.any(theta < 1):
        raise ConstraintViolationError("the offset approximation needs alpha, beta >= 1")
    if family == "dirichlet-categorical" and np.any(theta <= 1):
        raise ConstraintViolationError("the offset approximation needs alpha, beta, gamma > 1")
    if family not in APPROX_FAMILIES:
        raise ValueError(f"no offset approximation for {family!r}")
    return family, theta


def pooled_loglik_offset_approx(gs: GraphSet, params: ModelParams) -> float:
    """Unnormalized pooled potential with lnGamma(x + z) ~ lnGamma(x) + z log x.

    Only differences between parameter points are meaningful.
    """
    family, theta = _approx_theta(params)
    stats = _approx_stats(gs, family)
    offsets = lgamma(stats).sum()
    if family == "dirichlet-categorical":
        offsets -= LOG2 * stats[:, 1].sum()
    return float(offsets + np.log(stats).sum(axis=0) @ theta)


def _approx_log_normalizer(total: int, family: str, theta) -> tuple[float, np.ndarray]:
    """log of the approximate model's normalizing factor for one graph size.

    Returns the value and its gradient (the model expectation of the log
    statistics). Summing the potential over graphs grouped by statistic
    value collapses to x!-free weights prod_j s_j ** (theta_j - 1).
    """
    if family == "beta-bernoulli":
        e = np.arange(total + 1, dtype=float)
        parts = np.stack([e, total - e])
    else:
        m, a = np.meshgrid(np.arange(total + 1), np.arange(total + 1), indexing="ij")
        keep = m + a <= total
        m, a = m[keep].astype(float), a[keep].astype(float)
        parts = np.stack([m, a, total - m - a])
    logw = sum(xlogy(t - 1, s) for t, s in zip(theta, parts))
    lse = logsumexp(logw)
    w = np.exp(logw - lse)
    with np.errstate(divide="ignore"):
        logs = np.log(parts)
    expected = np.array([np.sum(w * np.where(w > 0, row, 0.0)) for row in logs])
    return float(lgamma(total + 1) + lse), expected


def _approx_loglik_and_grad(gs: GraphSet, family: str, theta) -> tuple[float, np.ndarray]:
    stats = _approx_stats(gs, family)
    totals = stats.sum(axis=1)
    offsets = lgamma(stats).sum()
    if family == "dirichlet-categorical":
        offsets -= LOG2 * stats[:, 1].sum()
    logs = np.log(stats)
    ll = offsets + float(logs.sum(axis=0) @ theta)
    grad = logs.sum(axis=0).astype(float)
    sizes, counts = np.unique(totals, return_counts=True)
    for size, cnt in zip(sizes, counts):
        lz, expected = _approx_log_normalizer(int(size), family, theta)
        ll -= cnt * lz
        grad -= cnt * expected
    return float(ll), grad


def offset_approx_loglik(gs: GraphSet, params: ModelParams) -> float:
    """Normalized log-likelihood of the offset-approximate model."""
    family, theta = _approx_theta(params)
    return _approx_loglik_and_grad(gs, family, theta)[0]


# --- identifiability -----------------------------------------------------------


@dataclass(frozen=True)
class Degeneracy:
    reason: str
    detail: str
    recession: dict | None = None


def identifiability_check(gs: GraphSet, family: str) -> Degeneracy | None:
    """None when the family is identifiable from ``gs``, else the reason it is not."""
    if family not in PARAM_NAMES:
        raise ValueError(f"unknown family {family!r}")
    k_min = MIN_GRAPHS[family]
    if len(gs) < k_min:
        recession = None
        if len(gs) == 1 and family in ("beta-bernoulli", "beta-bernoulli-meandeg"):
            recession = {"mean_density": float(gs.edges[0] / gs.edge_capacity[0])}
        elif len(gs) == 1 and family in DYADIC:
            cen = gs.census[0] / gs.census[0].sum()
            recession = dict(zip(("m", "a", "n"), map(float, cen)))
        return Degeneracy(
            "insufficient-observations",
            f"{family} cannot be identified from {len(gs)} graph(s); at least {k_min} are needed",
            recession,
        )
    if family == "bernoulli":
        return None
    if family in DYADIC:
        cen = gs.census
        props = cen / cen.sum(axis=1, keepdims=True)
        spread = np.ptp(props, axis=0).max()
    elif family == "beta-bernoulli-meandeg":
        spread = np.ptp((gs.n_vertices - 1) * gs.edges / gs.edge_capacity)
    else:
        spread = np.ptp(gs.edges / gs.edge_capacity)
    if spread == 0:
        return Degeneracy("zero-dispersion", "the graphs show no between-graph variation in the relevant statistics")
    return None


# --- transforms ------------------------------------------------------------------


# keeps sigma strictly below its validity bound even at the logit cap
_FRAC_MAX = 1.0 - 1e-9


class _Transform:
    """Map between unconstrained optimizer coordinates t and natural parameters."""

    def __init__(self, family: str, gs: GraphSet, approx: bool):
        self.family = family
        self.approx = approx
        self.c_min = float((gs.n_vertices - 1).min())
        if family in ("beta-bernoulli-meandeg", "dc-nnd"):
            self.scale = "logit"
        else:
            self.scale = "log-minus-one" if approx else "log"

    def natural(self, t):
        t = np.asarray(t, dtype=float)
        if self.scale == "log":
            return np.exp(t)
        if self.scale == "log-minus-one":
            return 1 + np.exp(t)
        c = self.c_min
        mu = c * expit(t[0])
        frac = _FRAC_MAX * expit(t[-1])
        if self.family == "beta-bernoulli-meandeg":
            return np.array([mu, math.sqrt(mu * (c - mu) * frac)])
        return np.array([mu, expit(t[1]), math.sqrt(mu * (c - mu) * frac)])

    def jacobian(self, t) -> np.ndarray:
        """d natural / d t."""
        t = np.asarray(t, dtype=float)
        if self.scale == "log":
            return np.diag(np.exp(t))
        if self.scale == "log-minus-one":
            return np.diag(np.exp(t))
        c = self.c_min
        s1 = expit(t[0])
        mu = c * s1
        dmu = c * s1 * (1 - s1)
        ts = t[-1]
        s2 = _FRAC_MAX * expit(ts)
        sigma = math.sqrt(mu * (c - mu) * s2)
        dsig_dt0 = (c - 2 * mu) * s2 * dmu / (2 * sigma)
        dsig_dts = mu * (c - mu) * s2 * (1 - expit(ts)) / (2 * sigma)
        if self.family == "beta-bernoulli-meandeg":
            return np.array([[dmu, 0.0], [dsig_dt0, dsig_dts]])
        sr = expit(t[1])
        return np.array([[dmu, 0.0, 0.0], [0.0, sr * (1 - sr), 0.0], [dsig_dt0, 0.0, dsig_dts]])

    def unconstrained(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.scale == "log":
            return np.log(theta)
        if self.scale == "log-minus-one":
            return np.log(theta - 1)
        c = self.c_min
        mu = theta[0]
        frac = theta[-1] ** 2 / (mu * (c - mu) * _FRAC_MAX)
        if self.family == "beta-bernoulli-meandeg":
            return np.array([logit(mu / c), logit(frac)])
        return np.array([logit(mu / c), logit(theta[1]), logit(frac)])


# --- fitting ------------------------------------------------------------------


@dataclass
class FitConfig:
    approx: bool = False
    max_iter: int = 1000
    grad_tol: float = 1e-6
    log_cap: float = 30.0
    hessian_step: float = 1e-4
    newton_steps: int = 50


@dataclass
class FitResult:
    family: str
    estimates: dict[str, float]
    std_errors: dict[str, float]
    scale: str
    log_likelihood: float
    null_deviance: float
    n_params: int
    n_edge_variables: int
    converged: bool
    flags: list[str] = field(default_factory=list)
    degenerate: Degeneracy | None = None
    data_digest: str = ""
    gradient_norm: float = float("nan")

    @property
    def deviance(self) -> float:
        return -2.0 * self.log_likelihood

    @property
    def aic(self) -> float:
        return self.deviance + 2 * self.n_params

    @property
    def df_residual(self) -> int:
        return self.n_edge_variables - self.n_params

    @property
    def df_null(self) -> int:
        return self.n_edge_variables

    def to_dict(self) -> dict:
        def num(x):
            return None if x is None or not math.isfinite(x) else float(f"{x:.12g}")

        return {
            "family": self.family,
            "estimates": {k: num(v) for k, v in self.estimates.items()},
            "std_errors": {k: num(v) for k, v in self.std_errors.items()},
            "scale": self.scale,
            "logLik": num(self.log_likelihood),
            "deviance": num(self.deviance),
            "nullDeviance": num(self.null_deviance),
            "aic": num(self.aic),
            "converged": self.converged,
            "flags": list(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _moment_start(gs: GraphSet, family: str) -> np.ndarray:
    """Method-of-moments starting point on the natural scale."""
    c = (gs.n_vertices - 1).astype(float)
    if family in ("beta-bernoulli", "beta-bernoulli-meandeg"):
        d = gs.edges / gs.edge_capacity
        mean = d.mean()
        var = d.var(ddof=1) - mean * (1 - mean) / gs.edge_capacity.mean()
        if 0 < mean < 1 and 0 < var < mean * (1 - mean):
            k = mean * (1 - mean) / var - 1
            ab = np.array([mean * k, (1 - mean) * k])
        else:
            ab = np.array([1.0, 1.0])
            mean, var = 0.5, 1.0 / 12.0
        if family == "beta-bernoulli":
            return ab
        c_min = c.min()
        mu = float(np.clip(np.mean(c * d), 0.05 * c_min, 0.95 * c_min))
        sigma2 = var * np.mean(c) ** 2
        sigma2 = min(sigma2, 0.9 * mu * (c_min - mu)) if sigma2 > 0 else 0.5 * mu * (c_min - mu)
        return np.array([mu, math.sqrt(sigma2)])
    cen = gs.census.astype(float)
    props = cen / cen.sum(axis=1, keepdims=True)
    means = props.mean(axis=0)
    pn = means[2]
    var = props[:, 2].var(ddof=1) - pn * (1 - pn) / cen.sum(axis=1).mean()
    if 0 < pn < 1 and 0 < var < pn * (1 - pn) and np.all(means > 0):
        s = pn * (1 - pn) / var - 1
        abg = s * means
    else:
        abg = np.ones(3)
        var = pn * (1 - pn) / 4 if 0 < pn < 1 else 0.05
    if family == "dirichlet-categorical":
        return abg
    c_min = c.min()
    nonnull = props[:, 0] + props[:, 1]
    mu = float(np.clip(np.mean(c * nonnull), 0.05 * c_min, 0.95 * c_min))
    tot = cen[:, 0].sum() + cen[:, 1].sum()
    r = float(np.clip(cen[:, 0].sum() / tot if tot else 0.5, 0.02, 0.98))
    sigma2 = var * np.mean(c) ** 2
    sigma2 = min(sigma2, 0.9 * mu * (c_min - mu)) if sigma2 > 0 else 0.5 * mu * (c_min - mu)
    return np.array([mu, r, math.sqrt(sigma2)])


def _limit_loglik(gs: GraphSet, family: str, theta) -> float:
    """Log-likelihood in the infinite-concentration limit along the current mean."""
    e, cap = gs.edges, gs.edge_capacity
    if family == "beta-bernoulli":
        delta = np.full(len(gs), theta[0] / (theta[0] + theta[1]))
    elif family == "beta-bernoulli-meandeg":
        delta = theta[0] / (gs.n_vertices - 1)
    else:
        if family == "dirichlet-categorical":
            s = theta.sum()
            rates = [np.full(len(gs), v / s) for v in theta]
        else:
            c = gs.n_vertices - 1
            nonnull = theta[0] / c
            rates = [theta[1] * nonnull, (1 - theta[1]) * nonnull, 1 - nonnull]
        cen = gs.census
        return float(np.sum(uman_log_pmf_counts(cen[:, 0], cen[:, 1], cen[:, 2], *rates)))
    with np.errstate(divide="ignore"):
        return float(np.sum(xlogy(e, delta) + xlogy(cap - e, 1 - delta)))


def _hessian(grad_fn, t, step) -> np.ndarray:
    p = len(t)
    h = np.empty((p, p))
    for i in range(p):
        dt = np.zeros(p)
        dt[i] = step * max(1.0, abs(t[i]))
        h[:, i] = (grad_fn(t + dt) - grad_fn(t - dt)) / (2 * dt[i])
    return 0.5 * (h + h.T)


def _fit_bernoulli(gs: GraphSet, null_dev: float, n_vars: int) -> FitResult:
    e, cap = gs.edges.sum(), gs.edge_capacity.sum()
    delta = e / cap
    flags = []
    if 0 < delta < 1:
        ll = pooled_loglik(gs, BernoulliParams(delta))
        se = math.sqrt(delta * (1 - delta) / cap)
        converged = True
    else:
        ll, se, converged = 0.0, float("nan"), False
        flags.append("boundary")
    return FitResult(
        "bernoulli", {"delta": float(delta)}, {"delta": se}, "natural", ll, null_dev, 1, n_vars,
        converged, flags, None, gs.digest, 0.0,
    )


def fit_mle(gs: GraphSet, family: str, config: FitConfig | None = None) -> FitResult:
    """Maximum-likelihood fit of ``family`` to a graph set.

    Degenerate data (too few graphs) yield a FitResult with
    ``converged=False`` and ``degenerate`` set instead of an exception.
    """
    config = config or FitConfig()
    if family not in PARAM_NAMES:
        raise ValueError(f"unknown family {family!r}; expected one of {sorted(PARAM_NAMES)}")
    if config.approx and family not in APPROX_FAMILIES:
        raise ValueError(f"the offset approximation is available for {sorted(APPROX_FAMILIES)} only")
    _check_space(gs, family)
    names = PARAM_NAMES[family]
    n_vars = int(gs.edge_capacity.sum())
    null_dev = 2.0 * LOG2 * n_vars
    degenerate = identifiability_check(gs, family)

    if family == "bernoulli":
        return _fit_bernoulli(gs, null_dev, n_vars)

    nan = float("nan")
    if degenerate is not None and degenerate.reason == "insufficient-observations":
        return FitResult(
            family, dict.fromkeys(names, nan), dict.fromkeys(names, nan), "natural", nan, null_dev,
            len(names), n_vars, False, ["degenerate", degenerate.reason], degenerate, gs.digest,
        )

    tr = _Transform(family, gs, config.approx)

    if config.approx:
        stats_ok = _approx_stats(gs, family)  # raises on zero statistics
        del stats_ok

        def value_grad(theta):
            return _approx_loglik_and_grad(gs, family, theta)
    else:
        def value_grad(theta):
            return float(np.sum(_per_graph_loglik(gs, family, theta))), _grad_natural(gs, family, theta)

    def objective(t):
        theta = tr.natural(t)
        try:
            ll, g = value_grad(theta)
        except GraphmixError:
            return np.inf, np.zeros_like(t)
        if not np.isfinite(ll):
            return np.inf, np.zeros_like(t)
        return -ll, -(tr.jacobian(t).T @ g)

    def grad_t(t):
        return objective(t)[1]

    start = _moment_start(gs, family)
    if config.approx:
        start = np.maximum(start, 1.5)
    cap = config.log_cap
    t0 = np.clip(tr.unconstrained(start), -cap + 1, cap - 1)
    bounds = [(-cap, cap)] * len(names)

    flags: list[str] = []
    try:
        res = minimize(objective, t0, jac=True, method="L-BFGS-B", bounds=bounds,
                       options={"maxiter": config.max_iter, "ftol": 0.0, "gtol": 1e-12})
        t_hat = res.x
        if not np.isfinite(res.fun):
            raise FloatingPointError
    except (FloatingPointError, ValueError):
        flags.append("simplex-fallback")
        res = minimize(lambda t: objective(np.clip(t, -cap, cap))[0], t0, method="Nelder-Mead",
                       options={"maxiter": config.max_iter * 10, "xatol": 1e-10, "fatol": 1e-12})
        t_hat = np.clip(res.x, -cap, cap)

    # Newton polish so the first-order condition holds to grad_tol.
    f_hat, g_hat = objective(t_hat)
    for _ in range(config.newton_steps):
        if np.linalg.norm(g_hat) < config.grad_tol:
            break
        h = _hessian(grad_t, t_hat, config.hessian_step)
        try:
            if np.any(np.linalg.eigvalsh(h) <= 0):
                break
            step = -np.linalg.solve(h, g_hat)
        except np.linalg.LinAlgError:
            break
        improved = False
        for scale in (1.0, 0.5, 0.25, 0.125, 0.0625):
            cand = np.clip(t_hat + scale * step, -cap, cap)
            f_c, g_c = objective(cand)
            if f_c <= f_hat + 1e-12 * abs(f_hat):
                t_hat, f_hat, g_hat = cand, f_c, g_c
                improved = True
                break
        if not improved:
            break

    theta_hat = tr.natural(t_hat)
    gnorm = float(np.linalg.norm(g_hat))
    converged = gnorm < config.grad_tol
    at_cap = np.any(np.abs(t_hat) >= cap - 1e-6)
    ll_hat = -f_hat
    # lgamma cancellation at huge concentrations needs a relative tolerance
    if not config.approx and _limit_loglik(gs, family, theta_hat) >= ll_hat - 1e-9 * (1 + abs(ll_hat)):
        at_cap = True
    if at_cap:
        flags.append("boundary")
        converged = False
    if degenerate is not None:
        flags.extend(["degenerate", degenerate.reason])
        converged = False
    if not converged and not at_cap and degenerate is None:
        flags.append("not-converged")
    if config.approx:
        flags.append("offset-approx")

    h = _hessian(grad_t, t_hat, config.hessian_step)
    se_nat = np.full(len(names), nan)
    try:
        cov_t = np.linalg.inv(h)
        if np.all(np.linalg.eigvalsh(h) > 0):
            jac = tr.jacobian(t_hat)
            se_nat = np.sqrt(np.diag(jac @ cov_t @ jac.T))
        else:
            flags.append("singular-hessian")
    except np.linalg.LinAlgError:
        flags.append("singular-hessian")

    return FitResult(
        family,
        dict(zip(names, map(float, theta_hat))),
        dict(zip(names, map(float, se_nat))),
        tr.scale,
        float(ll_hat),
        null_dev,
        len(names),
        n_vars,
        bool(converged),
        flags,
        degenerate,
        gs.digest,
        gnorm,
    )


@dataclass(frozen=True)
class ComparisonRow:
    family: str
    deviance: float
    df: int
    aic: float


def model_comparison(fits: Sequence[FitResult]) -> list[ComparisonRow]:
    """Rows of (family, deviance, residual df, AIC) sorted by AIC."""
    if not fits:
        return []
    digests = {f.data_digest for f in fits}
    if len(digests) > 1:
        raise DataMismatchError("fits were computed on different graph sets")
    rows = [ComparisonRow(f.family, f.deviance, f.df_residual, f.aic) for f in fits]
    return sorted(rows, key=lambda r: (math.isnan(r.aic), r.aic))


def comparison_csv(rows: Sequence[ComparisonRow]) -> str:
    lines = ["family,deviance,df,aic"]
    lines += [f"{r.family},{r.deviance:.12g},{r.df},{r.aic:.12g}" for r in rows]
    return "\n".join(lines) + "\n"
