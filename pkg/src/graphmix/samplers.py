"""Exact mixture samplers, baseline samplers and contagion dynamics.

Every sampler takes an explicit :class:`numpy.random.Generator`. Use
:func:`make_rng` to build one from a 64-bit seed; it wraps numpy's
counter-based Philox-4x64 bit generator, so a seed plus an identical call
sequence reproduces the same stream on any platform.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidEdgeCountError, UnsupportedSpaceError
from .graphs import GliRecord, Graph, GraphSpace, gli
from .models import (
    BernoulliParams,
    BetaBernoulliParams,
    DirichletCategoricalParams,
    UmanParams,
)


def make_rng(seed: int | None = None) -> np.random.Generator:
    if seed is not None and not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return np.random.Generator(np.random.Philox(seed))


def sample_bernoulli_graph(space: GraphSpace, p: BernoulliParams, rng: np.random.Generator) -> Graph:
    x = rng.random(space.edge_capacity) < p.delta
    return Graph.from_edge_vector(space, x)


def sample_cug(space: GraphSpace, e: int, rng: np.random.Generator) -> Graph:
    """Uniform draw among graphs with exactly ``e`` edges."""
    cap = space.edge_capacity
    if int(e) != e or not 0 <= e <= cap:
        raise InvalidEdgeCountError(f"edge count must be an integer in [0, {cap}], got {e!r}")
    idx = np.arange(cap)
    # partial Fisher-Yates: the first e slots end up a uniform e-subset
    for k in range(int(e)):
        j = k + int(rng.integers(cap - k))
        idx[k], idx[j] = idx[j], idx[k]
    x = np.zeros(cap, dtype=bool)
    x[idx[: int(e)]] = True
    return Graph.from_edge_vector(space, x)


def _uman_adjacency(n_vertices: int, probs, rng: np.random.Generator) -> np.ndarray:
    iu, ju = np.triu_indices(n_vertices, 1)
    state = rng.choice(3, size=iu.size, p=np.asarray(probs, dtype=float))
    forward = rng.random(iu.size) < 0.5
    adj = np.zeros((n_vertices, n_vertices), dtype=bool)
    mutual = state == 0
    asym = state == 1
    adj[iu[mutual], ju[mutual]] = True
    adj[ju[mutual], iu[mutual]] = True
    adj[iu[asym & forward], ju[asym & forward]] = True
    adj[ju[asym & ~forward], iu[asym & ~forward]] = True
    return adj


def sample_uman(space: GraphSpace, p: UmanParams, rng: np.random.Generator) -> Graph:
    """Independent dyads with state probabilities (m, a, n); asymmetric dyads orient uniformly."""
    space.require_dyadic("sample_uman")
    probs = np.array([p.m, p.a, p.n])
    return Graph(space, _uman_adjacency(space.n_vertices, probs / probs.sum(), rng))


def _gamma_ratio(shapes, rng: np.random.Generator) -> np.ndarray:
    while True:
        g = rng.standard_gamma(shapes)
        total = g.sum()
        if total > 0:
            return g / total


def sample_beta_bernoulli(space: GraphSpace, p: BetaBernoulliParams, rng: np.random.Generator) -> tuple[Graph, float]:
    """Draw delta ~ Beta(alpha, beta), then a Bernoulli(delta) graph."""
    delta = float(_gamma_ratio(np.array([p.alpha, p.beta]), rng)[0])
    x = rng.random(space.edge_capacity) < delta
    return Graph.from_edge_vector(space, x), delta


def sample_dirichlet_categorical(
    space: GraphSpace, p: DirichletCategoricalParams, rng: np.random.Generator
) -> tuple[Graph, tuple[float, float, float]]:
    """Draw (m, a, n) ~ Dirichlet(alpha, beta, gamma), then a U|man graph."""
    space.require_dyadic("sample_dirichlet_categorical")
    rates = _gamma_ratio(np.array([p.alpha, p.beta, p.gamma]), rng)
    g = Graph(space, _uman_adjacency(space.n_vertices, rates, rng))
    return g, (float(rates[0]), float(rates[1]), float(rates[2]))


def gibbs_sweep_dc(y: Graph, p: DirichletCategoricalParams, rng: np.random.Generator) -> Graph:
    """One systematic-scan Gibbs sweep over every edge variable, row-major."""
    return Graph(y.space, gibbs_chain_dc(y, p, 1, rng)[-1])


def gibbs_chain_dc(y: Graph, p: DirichletCategoricalParams, n_sweeps: int, rng: np.random.Generator) -> np.ndarray:
    """Run ``n_sweeps`` sweeps and return the adjacency after each one."""
    y.space.require_dyadic("gibbs_chain_dc")
    n = y.space.n_vertices
    state = y.adjacency.astype(np.int64)
    u = rng.random((n_sweeps, n * (n - 1)))
    out = np.empty((n_sweeps, n, n), dtype=np.int64)
    _kernels.dc_gibbs_sweeps(state, u, float(p.alpha), float(p.beta), float(p.gamma), out)
    return out.astype(bool)


# --- contagion --------------------------------------------------------------


@dataclass
class ContagionTrace:
    """States of a contagion run at every recorded step.

    ``snapshots`` holds the edge-variable vector at each recorded step;
    graph-level indices are derived from them on demand.
    """

    space: GraphSpace
    steps: np.ndarray
    snapshots: np.ndarray
    final_graph: Graph
    _gli: list[GliRecord] | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def edge_counts(self) -> np.ndarray:
        return self.snapshots.sum(axis=1)

    @property
    def density(self) -> np.ndarray:
        return self.edge_counts / self.space.edge_capacity

    @property
    def gli(self) -> list[GliRecord]:
        if self._gli is None:
            self._gli = [gli(Graph.from_edge_vector(self.space, x)) for x in self.snapshots]
        return self._gli

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "density", "reciprocity", "connectedness"])
        for t, rec in zip(self.steps, self.gli):
            recip = "" if rec.edgewise_reciprocity is None else f"{rec.edgewise_reciprocity:.12g}"
            w.writerow([int(t), f"{rec.density:.12g}", recip, f"{rec.connectedness:.12g}"])
        return buf.getvalue()


def run_contagion(
    y0: Graph, p: BetaBernoulliParams, rounds: int, thin: int, rng: np.random.Generator
) -> ContagionTrace:
    """Contagious tie formation: one uniformly chosen ordered pair per round.

    The chosen tie is set to 1 iff U < cond_edge_prob_bb(e_rest). Each block
    of ``thin`` rounds draws its pair indices first, then its uniforms.
    """
    space = y0.space
    if not space.directed:
        raise UnsupportedSpaceError("run_contagion needs a directed space (actors update outgoing ties)")
    cap = space.edge_capacity
    if cap < 1:
        raise UnsupportedSpaceError("run_contagion needs at least one edge variable")
    if rounds < 0 or thin < 1:
        raise ValueError("rounds must be >= 0 and thin >= 1")
    x = y0.edge_vector().astype(np.int64)
    e = int(x.sum())
    n_records = rounds // thin + 1
    steps = np.arange(n_records) * thin
    snapshots = np.empty((n_records, cap), dtype=bool)
    snapshots[0] = x
    alpha, beta = float(p.alpha), float(p.beta)
    for r in range(1, n_records):
        pairs = rng.integers(0, cap, size=thin)
        u = rng.random(thin)
        e = _kernels.contagion_rounds(x, e, pairs, u, cap, alpha, beta)
        snapshots[r] = x
    tail = rounds - (n_records - 1) * thin
    if tail:
        pairs = rng.integers(0, cap, size=tail)
        u = rng.random(tail)
        e = _kernels.contagion_rounds(x, e, pairs, u, cap, alpha, beta)
    return ContagionTrace(space, steps, snapshots, Graph.from_edge_vector(space, x.astype(bool)))
