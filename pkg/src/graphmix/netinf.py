"""Bayesian inference of a criterion graph from error-prone reports.

Each data source ("slice") reports the whole adjacency matrix. A true edge
is reported with probability 1 - fn and a true non-edge with probability
fp. The sampler alternates a sweep over the graph given the error rates
with conjugate beta draws of the rates given the graph.

All observation evidence enters through per-cell log-likelihoods, so
noiseless reports (rates of exactly 0 or 1) force deterministic states
instead of overflowing a likelihood ratio.
"""

from __future__ import annotations

import csv
import io
import json
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import expit, xlogy

from . import _kernels
from .errors import (
    DataMismatchError,
    DomainError,
    EmptyDrawsError,
    InfeasibleError,
    InsufficientChainsError,
    SupportViolationError,
    UnsupportedSpaceError,
)
from .graphs import Graph, GraphSpace
from .models import BernoulliParams, BetaBernoulliParams, DirichletCategoricalParams, UmanParams
from .samplers import make_rng, sample_uman

PriorParams = BernoulliParams | BetaBernoulliParams | DirichletCategoricalParams


def _require_netinf_space(space: GraphSpace) -> None:
    if not space.directed or space.loops:
        raise UnsupportedSpaceError("network inference works on directed loopless spaces")


# --- data -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Ordered slices, stored as a read-only (S, n, n) boolean array."""

    space: GraphSpace
    slices: np.ndarray

    def __post_init__(self):
        _require_netinf_space(self.space)
        arr = np.array(self.slices, dtype=float)
        n = self.space.n_vertices
        if arr.ndim != 3 or arr.shape[1:] != (n, n):
            raise DataMismatchError(f"slices must have shape (S, {n}, {n}), got {arr.shape}")
        bad = np.argwhere((arr != 0) & (arr != 1))
        if bad.size:
            k, i, j = bad[0]
            raise SupportViolationError(f"slice {k + 1} cell ({i + 1},{j + 1}) is not 0/1")
        diag = np.argwhere(arr[:, np.arange(n), np.arange(n)] != 0)
        if diag.size:
            k, i = diag[0]
            raise SupportViolationError(f"slice {k + 1} reports a loop at cell ({i + 1},{i + 1})")
        out = arr.astype(bool)
        out.flags.writeable = False
        object.__setattr__(self, "slices", out)

    def __len__(self) -> int:
        return self.slices.shape[0]

    def truncate(self, n_slices: int) -> "ObservationSet":
        return ObservationSet(self.space, self.slices[:n_slices])

    def to_json(self) -> str:
        """Edge lists per slice with 1-indexed vertices, like graph-set files."""
        slices = [[[int(i) + 1, int(j) + 1] for i, j in zip(*np.nonzero(s))] for s in self.slices]
        return json.dumps({"n": self.space.n_vertices, "directed": self.space.directed, "slices": slices})

    @classmethod
    def from_json(cls, text: str) -> "ObservationSet":
        doc = json.loads(text)
        if not isinstance(doc, dict) or "n" not in doc or "slices" not in doc:
            raise ValueError("observation file needs keys 'n' and 'slices'")
        n = doc["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ValueError(f"'n' must be a positive integer, got {n!r}")
        space = GraphSpace(n, directed=bool(doc.get("directed", True)))
        arr = np.zeros((len(doc["slices"]), n, n), dtype=bool)
        for k, edges in enumerate(doc["slices"]):
            for e in edges:
                if not isinstance(e, (list, tuple)) or len(e) != 2 or not all(isinstance(v, int) for v in e):
                    raise ValueError(f"slice {k + 1}: edge {e!r} is not a pair of integers")
                i, j = e
                if not (1 <= i <= n and 1 <= j <= n):
                    raise SupportViolationError(f"slice {k + 1}: cell ({i},{j}) lies outside 1..{n}")
                arr[k, i - 1, j - 1] = True
        return cls(space, arr)


def uman_from_density_reciprocity(density: float, reciprocity: float) -> UmanParams:
    """Dyad-state probabilities with the given expected density and edgewise reciprocity."""
    if not 0.0 <= density <= 1.0 or not 0.0 <= reciprocity <= 1.0:
        raise DomainError("density and reciprocity must lie in [0, 1]")
    m = density * reciprocity
    a = 2.0 * density * (1.0 - reciprocity)
    n = 1.0 - m - a
    if n < -1e-12 or a > 1.0:
        raise InfeasibleError(f"density {density} with reciprocity {reciprocity} needs m={m}, a={a}, n={n}")
    return UmanParams(m, a, max(n, 0.0))


def simulate_css(criterion: Graph, fp: float, fn: float, n_slices: int, rng: np.random.Generator) -> ObservationSet:
    """Independent reports: Pr(report 1) is 1 - fn on edges and fp on non-edges."""
    if not (0.0 <= fp <= 1.0 and 0.0 <= fn <= 1.0):
        raise DomainError("error rates must lie in [0, 1]")
    space = criterion.space
    _require_netinf_space(space)
    n = space.n_vertices
    u = rng.random((n_slices, n, n))
    rep = np.where(criterion.adjacency, u < 1.0 - fn, u < fp)
    rep[:, np.arange(n), np.arange(n)] = False
    return ObservationSet(space, rep)


# --- configuration ------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorModel:
    """Beta priors on the false-positive and false-negative rates."""

    fp_prior: tuple[float, float] = (1.0, 11.0)
    fn_prior: tuple[float, float] = (1.0, 11.0)
    pooling: str = "global"

    def __post_init__(self):
        for name in ("fp_prior", "fn_prior"):
            pair = tuple(float(v) for v in getattr(self, name))
            if len(pair) != 2 or not all(v > 0 and np.isfinite(v) for v in pair):
                raise DomainError(f"{name} must be two positive numbers, got {pair!r}")
            object.__setattr__(self, name, pair)
        if self.pooling not in ("global", "per-source"):
            raise ValueError(f"pooling must be 'global' or 'per-source', got {self.pooling!r}")

    def prior_means(self) -> tuple[float, float]:
        (a, b), (c, d) = self.fp_prior, self.fn_prior
        return a / (a + b), c / (c + d)


@dataclass(frozen=True)
class GibbsConfig:
    """Chain layout. ``fixed_rates`` = (fp, fn) disables the error-rate updates."""

    chains: int = 3
    burn_in: int = 100
    draws: int = 100
    thin: int = 1
    fixed_rates: tuple[float, float] | None = None

    def __post_init__(self):
        if self.chains < 1 or self.draws < 1 or self.burn_in < 0 or self.thin < 1:
            raise ValueError("need chains >= 1, draws >= 1, burn_in >= 0, thin >= 1")
        if self.fixed_rates is not None:
            fp, fn = self.fixed_rates
            if not (0.0 <= fp <= 1.0 and 0.0 <= fn <= 1.0):
                raise DomainError("fixed error rates must lie in [0, 1]")


_PRIOR_RE = re.compile(r"^\s*([a-z-]+)\s*\(([^)]*)\)\s*$")


def parse_prior(text: str) -> PriorParams:
    """Parse ``bernoulli(d)``, ``beta-bernoulli(a,b)`` or ``dirichlet-categorical(a,b,g)``."""
    m = _PRIOR_RE.match(text.lower())
    if not m:
        raise ValueError(f"cannot parse prior {text!r}")
    name, args = m.group(1), [float(v) for v in m.group(2).split(",") if v.strip()]
    kinds = {
        "bernoulli": (BernoulliParams, 1),
        "beta-bernoulli": (BetaBernoulliParams, 2),
        "dirichlet-categorical": (DirichletCategoricalParams, 3),
    }
    if name not in kinds or len(args) != kinds[name][1]:
        raise ValueError(f"cannot parse prior {text!r}")
    return kinds[name][0](*args)


def prior_label(p: PriorParams) -> str:
    if isinstance(p, BernoulliParams):
        return f"bernoulli({p.delta:g})"
    if isinstance(p, BetaBernoulliParams):
        return f"beta-bernoulli({p.alpha:g},{p.beta:g})"
    if isinstance(p, DirichletCategoricalParams):
        return f"dirichlet-categorical({p.alpha:g},{p.beta:g},{p.gamma:g})"
    raise TypeError(f"unsupported prior {p!r}")


# --- posterior sampling ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PosteriorDraws:
    """Retained draws; burn-in iterations are never stored.

    ``graphs`` has shape (chains, draws, n, n). ``fp`` and ``fn`` have shape
    (chains, draws, R) with R = 1 under global pooling, else one column per
    slice.
    """

    space: GraphSpace
    graphs: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    burn_in: int
    thin: int

    @property
    def n_chains(self) -> int:
        return self.graphs.shape[0]

    @property
    def n_draws(self) -> int:
        return self.graphs.shape[0] * self.graphs.shape[1]

    def _require_draws(self) -> None:
        if self.graphs.size == 0:
            raise EmptyDrawsError("no post-burn-in draws")

    def marginals(self) -> np.ndarray:
        """Pooled Pr(y_ij = 1) over all chains."""
        self._require_draws()
        return self.graphs.mean(axis=(0, 1))

    def density_series(self) -> np.ndarray:
        """Per-draw density, shape (chains, draws)."""
        return self.graphs.sum(axis=(2, 3)) / self.space.edge_capacity


def _cell_logliks(slices: np.ndarray, fp: np.ndarray, fn: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Summed log-likelihood of every cell's reports if the true state is 1 / 0.

    ``fp``/``fn`` hold one shared rate or one rate per slice. Shared rates
    only need the per-cell report counts.
    """
    if fp.size == 1 and fn.size == 1:
        c = slices.sum(axis=0, dtype=np.int64)
        silent = slices.shape[0] - c
        ll1 = xlogy(c, 1.0 - fn[0]) + xlogy(silent, fn[0])
        ll0 = xlogy(c, fp[0]) + xlogy(silent, 1.0 - fp[0])
    else:
        s = slices.astype(float)
        fp = np.broadcast_to(fp, (s.shape[0],))[:, None, None]
        fn = np.broadcast_to(fn, (s.shape[0],))[:, None, None]
        ll1 = (xlogy(s, 1.0 - fn) + xlogy(1.0 - s, fn)).sum(axis=0)
        ll0 = (xlogy(s, fp) + xlogy(1.0 - s, 1.0 - fp)).sum(axis=0)
    np.fill_diagonal(ll1, 0.0)
    np.fill_diagonal(ll0, 0.0)
    return ll1, ll0


def _bernoulli_sweeps(delta: float, ll1, ll0, u: np.ndarray) -> np.ndarray:
    """Independent edge draws for every row of ``u`` (shape (S, n, n))."""
    with np.errstate(divide="ignore"):
        w1 = np.log(delta) + ll1
        w0 = np.log1p(-delta) + ll0
    n = ll1.shape[0]
    off = ~np.eye(n, dtype=bool)
    if np.any(off & (w1 == -np.inf) & (w0 == -np.inf)):
        raise InfeasibleError("the reports have zero likelihood under both states of some cell")
    with np.errstate(invalid="ignore"):
        p = np.where(w1 == -np.inf, 0.0, np.where(w0 == -np.inf, 1.0, expit(w1 - w0)))
    out = (u < p) & off
    return out.astype(np.int64)


def _graph_sweeps(prior: PriorParams, y: np.ndarray, ll1, ll0, n_sweeps: int, rng) -> np.ndarray:
    """Run ``n_sweeps`` graph sweeps from state ``y`` (updated in place)."""
    n = y.shape[0]
    if isinstance(prior, BernoulliParams):
        out = _bernoulli_sweeps(prior.delta, ll1, ll0, rng.random((n_sweeps, n, n)))
        y[:] = out[-1]
        return out
    out = np.empty((n_sweeps, n, n), dtype=np.int64)
    if isinstance(prior, BetaBernoulliParams):
        u = rng.random((n_sweeps, n * (n - 1)))
        status = _kernels.posterior_bb_sweeps(y, ll1, ll0, u, float(prior.alpha), float(prior.beta), out)
    elif isinstance(prior, DirichletCategoricalParams):
        u = rng.random((n_sweeps, n * (n - 1) // 2))
        status = _kernels.posterior_dc_sweeps(
            y, ll1, ll0, u, float(prior.alpha), float(prior.beta), float(prior.gamma), out
        )
    else:
        raise TypeError(f"unsupported prior {prior!r}")
    if status < 0:
        raise InfeasibleError("the reports have zero likelihood under every state of some cell or dyad")
    return out


def _error_counts(slices: np.ndarray, y: np.ndarray, per_source: bool):
    """(FP, TN, FN, TP) counts over off-diagonal cells, per slice or summed."""
    n = y.shape[0]
    off = ~np.eye(n, dtype=bool)
    truth = y.astype(bool) & off
    absent = ~y.astype(bool) & off
    rep = slices
    fp = (rep & absent).sum(axis=(1, 2))
    tn = (~rep & absent).sum(axis=(1, 2))
    fn = (~rep & truth).sum(axis=(1, 2))
    tp = (rep & truth).sum(axis=(1, 2))
    if not per_source:
        fp, tn, fn, tp = (np.atleast_1d(v.sum()) for v in (fp, tn, fn, tp))
    return fp, tn, fn, tp


def _run_chain(obs: ObservationSet, prior: PriorParams, em: ErrorModel, config: GibbsConfig, rng):
    slices = obs.slices
    n_rates = len(obs) if em.pooling == "per-source" else 1
    n_iter = config.burn_in + config.draws * config.thin
    keep = slice(config.burn_in + config.thin - 1, n_iter, config.thin)
    # majority vote start; ties go to absent
    y = (slices.sum(axis=0) * 2 > len(obs)).astype(np.int64)

    if config.fixed_rates is not None:
        fp = np.full(n_rates, float(config.fixed_rates[0]))
        fn = np.full(n_rates, float(config.fixed_rates[1]))
        ll1, ll0 = _cell_logliks(slices, fp, fn)
        graphs = _graph_sweeps(prior, y, ll1, ll0, n_iter, rng)[keep].astype(bool)
        shape = (graphs.shape[0], n_rates)
        return graphs, np.broadcast_to(fp, shape).copy(), np.broadcast_to(fn, shape).copy()

    m_fp, m_fn = em.prior_means()
    fp = np.full(n_rates, m_fp)
    fn = np.full(n_rates, m_fn)
    n = obs.space.n_vertices
    graphs = np.empty((config.draws, n, n), dtype=bool)
    fp_out = np.empty((config.draws, n_rates))
    fn_out = np.empty((config.draws, n_rates))
    per_source = em.pooling == "per-source"
    (a_fp, b_fp), (a_fn, b_fn) = em.fp_prior, em.fn_prior
    slot = 0
    for it in range(n_iter):
        ll1, ll0 = _cell_logliks(slices, fp, fn)
        _graph_sweeps(prior, y, ll1, ll0, 1, rng)
        c_fp, c_tn, c_fn, c_tp = _error_counts(slices, y, per_source)
        fp = rng.beta(a_fp + c_fp, b_fp + c_tn)
        fn = rng.beta(a_fn + c_fn, b_fn + c_tp)
        if it >= config.burn_in and (it - config.burn_in + 1) % config.thin == 0:
            graphs[slot] = y
            fp_out[slot] = fp
            fn_out[slot] = fn
            slot += 1
    return graphs, fp_out, fn_out


def posterior_gibbs(
    obs: ObservationSet,
    prior: PriorParams,
    em: ErrorModel | None = None,
    config: GibbsConfig | None = None,
    rng: np.random.Generator | None = None,
) -> PosteriorDraws:
    """Gibbs sampler for the criterion graph and error rates.

    One iteration is a systematic sweep over the graph (row-major edge
    variables, or dyads i < j under a Dirichlet-categorical prior)
    followed by one error-rate update. Each chain gets its own spawned
    generator stream.
    """
    em = em or ErrorModel()
    config = config or GibbsConfig()
    if rng is None:
        rng = make_rng()
    if len(obs) == 0:
        raise DataMismatchError("posterior_gibbs needs at least one slice")
    if not isinstance(prior, (BernoulliParams, BetaBernoulliParams, DirichletCategoricalParams)):
        raise TypeError(f"unsupported prior {prior!r}")
    results = [_run_chain(obs, prior, em, config, child) for child in rng.spawn(config.chains)]
    graphs, fps, fns = (np.stack(part) for part in zip(*results))
    return PosteriorDraws(obs.space, graphs, fps, fns, config.burn_in, config.thin)


# --- summaries ----------------------------------------------------------------------


def point_estimate(draws: PosteriorDraws) -> Graph:
    """Edgewise marginal mode; a marginal of exactly 0.5 gives no edge."""
    return Graph(draws.space, draws.marginals() > 0.5)


def hamming_accuracy(est: Graph, criterion: Graph) -> float:
    """Fraction of edge variables on which the two graphs agree."""
    if est.space != criterion.space:
        raise DataMismatchError(f"space mismatch: {est.space} vs {criterion.space}")
    rows, cols = est.space.edge_index()
    return float(np.mean(est.adjacency[rows, cols] == criterion.adjacency[rows, cols]))


def psrf(chains) -> float:
    """Gelman-Rubin potential scale reduction factor of per-chain scalar series."""
    x = np.asarray(chains, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise InsufficientChainsError("psrf needs at least two chains")
    if x.shape[1] < 10:
        raise InsufficientChainsError("psrf needs chains of length >= 10")
    n = x.shape[1]
    w = x.var(axis=1, ddof=1).mean()
    b = n * x.mean(axis=1).var(ddof=1)
    if w == 0.0:
        return 1.0 if b == 0.0 else float("inf")
    return float(np.sqrt((n - 1) / n + b / (n * w)))


def _psrf_max(series: np.ndarray) -> float:
    """Largest psrf over the trailing axis (one series per error-rate column)."""
    return max(psrf(series[:, :, r]) for r in range(series.shape[2]))


def posterior_density_summary(draws: PosteriorDraws) -> float:
    """Posterior mean density over all retained draws."""
    draws._require_draws()
    return float(draws.density_series().mean())


# --- experiment harness -------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentDesign:
    """A density x reciprocity simulation study.

    ``conditions`` overrides the full cross of the level lists when given.
    """

    n_vertices: int = 30
    density_levels: tuple[float, ...] = (0.05, 0.25, 0.5)
    reciprocity_levels: tuple[float, ...] = (0.05, 0.5, 0.95)
    n_criterion: int = 30
    fp_rate: float = 0.05
    fn_rate: float = 0.5
    max_slices: int = 15
    priors: tuple[PriorParams, ...] = (
        BernoulliParams(0.05),
        BernoulliParams(0.5),
        BetaBernoulliParams(0.5, 0.5),
        DirichletCategoricalParams(0.5, 0.5, 0.5),
    )
    slice_schedule: tuple[int, ...] = (2, 3, 5, 10, 15)
    conditions: tuple[tuple[float, float], ...] | None = None
    error_model: ErrorModel = field(default_factory=ErrorModel)
    gibbs: GibbsConfig = field(default_factory=GibbsConfig)

    def __post_init__(self):
        if not (0.0 <= self.fp_rate <= 1.0 and 0.0 <= self.fn_rate <= 1.0):
            raise DomainError("error rates must lie in [0, 1]")
        sched = list(self.slice_schedule)
        if not sched or any(b < a for a, b in zip(sched, sched[1:])):
            raise ValueError("slice_schedule must be non-empty and non-decreasing")
        if sched[0] < 1 or sched[-1] > self.max_slices:
            raise ValueError(f"slice counts must lie in [1, max_slices={self.max_slices}]")
        if self.n_criterion < 1 or self.n_vertices < 2:
            raise ValueError("need n_criterion >= 1 and n_vertices >= 2")
        for d, r in self.condition_list():
            uman_from_density_reciprocity(d, r)

    def condition_list(self) -> list[tuple[float, float]]:
        if self.conditions is not None:
            return [(float(d), float(r)) for d, r in self.conditions]
        return [(d, r) for d in self.density_levels for r in self.reciprocity_levels]

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentDesign":
        doc = dict(doc)
        if "priors" in doc:
            doc["priors"] = tuple(parse_prior(p) if isinstance(p, str) else p for p in doc["priors"])
        for key in ("density_levels", "reciprocity_levels", "slice_schedule"):
            if key in doc:
                doc[key] = tuple(doc[key])
        if doc.get("conditions") is not None:
            doc["conditions"] = tuple(tuple(c) for c in doc["conditions"])
        if "error_model" in doc and isinstance(doc["error_model"], dict):
            em = dict(doc["error_model"])
            for key in ("fp_prior", "fn_prior"):
                if key in em:
                    em[key] = tuple(em[key])
            doc["error_model"] = ErrorModel(**em)
        if "gibbs" in doc and isinstance(doc["gibbs"], dict):
            g = dict(doc["gibbs"])
            if g.get("fixed_rates") is not None:
                g["fixed_rates"] = tuple(g["fixed_rates"])
            doc["gibbs"] = GibbsConfig(**g)
        return cls(**doc)


@dataclass(frozen=True)
class ExperimentRow:
    density: float
    reciprocity: float
    prior: str
    n_slices: int
    replicate: int
    accuracy: float
    inferred_density: float
    psrf_density: float
    psrf_fp: float
    psrf_fn: float
    estimate_density: float


RESULT_COLUMNS = (
    "density",
    "reciprocity",
    "prior",
    "n_slices",
    "replicate",
    "accuracy",
    "inferred_density",
    "psrf_density",
    "psrf_fp",
    "psrf_fn",
)


def _safe_psrf(fn, *args) -> float:
    try:
        return fn(*args)
    except InsufficientChainsError:
        return float("nan")


def _replicate(design: ExperimentDesign, cond: tuple[float, float], rep: int, seed) -> list[ExperimentRow]:
    data_seed, post_seed = seed.spawn(2)
    data_rng = np.random.Generator(np.random.Philox(data_seed))
    space = GraphSpace(design.n_vertices)
    criterion = sample_uman(space, uman_from_density_reciprocity(*cond), data_rng)
    obs = simulate_css(criterion, design.fp_rate, design.fn_rate, design.max_slices, data_rng)
    post_seeds = post_seed.spawn(len(design.priors) * len(design.slice_schedule))
    rows = []
    k = 0
    for prior in design.priors:
        for n_slices in design.slice_schedule:
            rng = np.random.Generator(np.random.Philox(post_seeds[k]))
            k += 1
            draws = posterior_gibbs(obs.truncate(n_slices), prior, design.error_model, design.gibbs, rng)
            est = point_estimate(draws)
            rows.append(
                ExperimentRow(
                    density=cond[0],
                    reciprocity=cond[1],
                    prior=prior_label(prior),
                    n_slices=n_slices,
                    replicate=rep,
                    accuracy=hamming_accuracy(est, criterion),
                    inferred_density=posterior_density_summary(draws),
                    psrf_density=_safe_psrf(psrf, draws.density_series()),
                    psrf_fp=_safe_psrf(_psrf_max, draws.fp),
                    psrf_fn=_safe_psrf(_psrf_max, draws.fn),
                    estimate_density=est.adjacency.sum() / space.edge_capacity,
                )
            )
    return rows


def worker_count() -> int:
    """Worker cap from GRAPHMIX_THREADS, defaulting to the CPU count."""
    env = os.environ.get("GRAPHMIX_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_experiment(design: ExperimentDesign, rng: np.random.Generator) -> list[ExperimentRow]:
    """Run every (condition, replicate) task; rows come back in a fixed order.

    Each task owns a seed spawned from one root drawn off ``rng``, so the
    result does not depend on the number of workers.
    """
    root = np.random.SeedSequence(int(rng.integers(2**63)))
    conds = design.condition_list()
    tasks = [(c, r) for c in conds for r in range(design.n_criterion)]
    seeds = root.spawn(len(tasks))
    workers = min(worker_count(), len(tasks))
    if workers <= 1:
        parts = [_replicate(design, c, r, s) for (c, r), s in zip(tasks, seeds)]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: _replicate(design, *job[0], job[1]), zip(tasks, seeds)))
    rows = [row for part in parts for row in part]
    rows.sort(key=lambda r: (conds.index((r.density, r.reciprocity)), _prior_order(design, r.prior), r.n_slices, r.replicate))
    return rows


def _prior_order(design: ExperimentDesign, label: str) -> int:
    return [prior_label(p) for p in design.priors].index(label)


def results_csv(rows: Sequence[ExperimentRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_COLUMNS)
    for r in rows:
        w.writerow(
            [
                f"{r.density:.12g}",
                f"{r.reciprocity:.12g}",
                r.prior,
                r.n_slices,
                r.replicate,
                f"{r.accuracy:.12g}",
                f"{r.inferred_density:.12g}",
                f"{r.psrf_density:.12g}",
                f"{r.psrf_fp:.12g}",
                f"{r.psrf_fn:.12g}",
            ]
        )
    return buf.getvalue()
