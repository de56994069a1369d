"""Brute-force enumeration over small graph spaces.

Graphs are encoded as e*-bit integers whose most significant bit is the
first edge variable in lexicographic order, so integer order matches the
lexicographic order of edge-variable vectors.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, xlogy

from .errors import InfeasibleError, SpaceTooLargeError
from .graphs import Graph, GraphSpace
from .models import ModelParams, log_pmf

MAX_EDGE_VARIABLES = 24


def _check_cap(space: GraphSpace) -> None:
    if space.edge_capacity > MAX_EDGE_VARIABLES:
        raise SpaceTooLargeError(
            f"{space} has {space.edge_capacity} edge variables; enumeration is capped at {MAX_EDGE_VARIABLES}"
        )


def edge_vectors(space: GraphSpace) -> np.ndarray:
    """All 2**e* edge-variable vectors, row k being the graph with encoding k."""
    _check_cap(space)
    cap = space.edge_capacity
    codes = np.arange(2**cap, dtype=np.int64)
    shifts = np.arange(cap - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(bool)


def encode(g: Graph) -> int:
    code = 0
    for bit in g.edge_vector():
        code = (code << 1) | int(bit)
    return code


def enumerate_graphs(space: GraphSpace) -> list[Graph]:
    return [Graph.from_edge_vector(space, x) for x in edge_vectors(space)]


@dataclass(frozen=True)
class EnumeratedDistribution:
    """Exact probabilities indexed by graph encoding."""

    space: GraphSpace
    probabilities: np.ndarray

    @property
    def total(self) -> float:
        return float(np.sum(self.probabilities))

    @property
    def entries(self) -> dict[int, float]:
        return {k: float(p) for k, p in enumerate(self.probabilities)}

    def marginals(self) -> np.ndarray:
        """Pr(y_k = 1) for each edge variable k."""
        return self.probabilities @ edge_vectors(self.space)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("encoding,probability\n")
        for k, p in enumerate(self.probabilities):
            buf.write(f"{k},{p:.12g}\n")
        return buf.getvalue()


def _log_prior(space: GraphSpace, model: ModelParams) -> np.ndarray:
    return np.array([log_pmf(g, model) for g in enumerate_graphs(space)])


def exact_distribution(space: GraphSpace, model: ModelParams) -> EnumeratedDistribution:
    """exp(log_pmf) of every graph in the space, unnormalized."""
    return EnumeratedDistribution(space, np.exp(_log_prior(space, model)))


def observation_loglik(space: GraphSpace, slices, fp: float, fn: float) -> np.ndarray:
    """Log-likelihood of the reports for every graph in the space.

    Slices enter only through integer per-cell report counts, so the result
    does not depend on slice order.
    """
    x = edge_vectors(space)
    rows, cols = space.edge_index()
    slices = list(slices)
    n_slices = len(slices)
    counts = np.zeros(space.edge_capacity, dtype=np.int64)
    for s in slices:
        counts += np.asarray(s, dtype=bool)[rows, cols]
    silent = n_slices - counts
    ll1 = xlogy(counts, 1 - fn) + xlogy(silent, fn)
    ll0 = xlogy(counts, fp) + xlogy(silent, 1 - fp)
    return np.where(x, ll1, ll0).sum(axis=1)


def exact_posterior(space: GraphSpace, prior: ModelParams, obs, fp: float, fn: float) -> EnumeratedDistribution:
    """Posterior over criterion graphs given slices and fixed error rates.

    ``obs`` is an ObservationSet or a sequence of adjacency matrices.
    """
    slices = getattr(obs, "slices", obs)
    logp = _log_prior(space, prior) + observation_loglik(space, slices, fp, fn)
    lse = logsumexp(logp)
    if not np.isfinite(lse):
        raise InfeasibleError("the reports have zero probability under every graph")
    return EnumeratedDistribution(space, np.exp(logp - lse))
