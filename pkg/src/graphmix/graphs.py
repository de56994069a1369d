"""Graph spaces, adjacency structures and their sufficient statistics."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import SupportViolationError, UnsupportedSpaceError


@dataclass(frozen=True)
class GraphSpace:
    """Support of a random graph: vertex count, directedness, loop policy."""

    n_vertices: int
    directed: bool = True
    loops: bool = False

    def __post_init__(self):
        if int(self.n_vertices) != self.n_vertices or self.n_vertices < 1:
            raise ValueError(f"n_vertices must be a positive integer, got {self.n_vertices!r}")
        object.__setattr__(self, "n_vertices", int(self.n_vertices))

    @property
    def edge_capacity(self) -> int:
        """Number of edge variables, e*."""
        n = self.n_vertices
        base = n * (n - 1) if self.directed else n * (n - 1) // 2
        return base + (n if self.loops else 0)

    @property
    def n_dyads(self) -> int:
        """Number of unordered vertex pairs, D*."""
        n = self.n_vertices
        return n * (n - 1) // 2

    @property
    def supports_dyad_census(self) -> bool:
        return self.directed and not self.loops

    def edge_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Row/column coordinates of the edge variables in lexicographic order."""
        return _edge_index(self)

    def require_dyadic(self, what: str = "operation") -> None:
        if not self.supports_dyad_census:
            raise UnsupportedSpaceError(
                f"{what} requires a directed, loopless space; got {self}"
            )


@lru_cache(maxsize=256)
def _edge_index(space: GraphSpace) -> tuple[np.ndarray, np.ndarray]:
    n = space.n_vertices
    rows, cols = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    rows, cols = rows.ravel(), cols.ravel()
    if space.directed:
        keep = rows != cols
    else:
        keep = rows < cols
    if space.loops:
        keep |= rows == cols
    rows, cols = rows[keep], cols[keep]
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


class Census(NamedTuple):
    mutual: int
    asymmetric: int
    null: int


@dataclass(frozen=True)
class GliRecord:
    """Graph-level indices. ``edgewise_reciprocity`` is None when undefined."""

    density: float
    edgewise_reciprocity: float | None
    connectedness: float


@dataclass(frozen=True, eq=False)
class Graph:
    """Binary adjacency structure over a :class:`GraphSpace`.

    The adjacency matrix is stored dense and read-only; vertices are
    0-indexed.
    """

    space: GraphSpace
    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=bool, copy=True)
        n = self.space.n_vertices
        if adj.shape != (n, n):
            raise SupportViolationError(f"adjacency shape {adj.shape} does not match {n} vertices")
        if not self.space.loops:
            bad = np.flatnonzero(np.diag(adj))
            if bad.size:
                i = int(bad[0]) + 1
                raise SupportViolationError(f"loop at cell ({i},{i}) but loops are not allowed")
        if not self.space.directed:
            bad = np.argwhere(adj != adj.T)
            if bad.size:
                i, j = (int(v) + 1 for v in bad[0])
                raise SupportViolationError(f"asymmetric cell ({i},{j}) in an undirected graph")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def empty(cls, space: GraphSpace) -> Graph:
        return cls(space, np.zeros((space.n_vertices,) * 2, dtype=bool))

    @classmethod
    def complete(cls, space: GraphSpace) -> Graph:
        return cls.from_edge_vector(space, np.ones(space.edge_capacity, dtype=bool))

    @classmethod
    def from_edges(cls, space: GraphSpace, edges: Iterable[tuple[int, int]]) -> Graph:
        """Build from 0-indexed (i, j) pairs; undirected pairs are symmetrized."""
        adj = np.zeros((space.n_vertices,) * 2, dtype=bool)
        for i, j in edges:
            adj[i, j] = True
            if not space.directed:
                adj[j, i] = True
        return cls(space, adj)

    @classmethod
    def from_edge_vector(cls, space: GraphSpace, x) -> Graph:
        x = np.asarray(x, dtype=bool)
        if x.shape != (space.edge_capacity,):
            raise SupportViolationError(
                f"edge vector has length {x.shape}, expected {space.edge_capacity}"
            )
        rows, cols = space.edge_index()
        adj = np.zeros((space.n_vertices,) * 2, dtype=bool)
        adj[rows, cols] = x
        if not space.directed:
            adj[cols, rows] = x
        return cls(space, adj)

    def edge_vector(self) -> np.ndarray:
        rows, cols = self.space.edge_index()
        return self.adjacency[rows, cols]

    def edges(self) -> list[tuple[int, int]]:
        rows, cols = self.space.edge_index()
        x = self.adjacency[rows, cols]
        return [(int(i), int(j)) for i, j in zip(rows[x], cols[x])]

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self):
        return hash((self.space, self.adjacency.tobytes()))

    def __repr__(self):
        e, _ = edge_counts(self)
        return f"Graph({self.space}, edges={e})"


def edge_counts(g: Graph) -> tuple[int, int]:
    """Return (e, n): realized and unrealized edge variables."""
    e = int(np.count_nonzero(g.edge_vector()))
    return e, g.space.edge_capacity - e


def _census_counts(adj: np.ndarray) -> Census:
    off = adj.copy()
    np.fill_diagonal(off, False)
    both = off & off.T
    either = off | off.T
    n = adj.shape[0]
    mutual = int(np.count_nonzero(np.triu(both, 1)))
    nonnull = int(np.count_nonzero(np.triu(either, 1)))
    return Census(mutual, nonnull - mutual, n * (n - 1) // 2 - nonnull)


def dyad_census(g: Graph) -> Census:
    """Mutual, asymmetric and null dyad counts of a directed loopless graph."""
    g.space.require_dyadic("dyad_census")
    return _census_counts(g.adjacency)


def connectedness(g: Graph) -> float:
    """Fraction of unordered vertex pairs joined by a path in the weakened graph."""
    n = g.space.n_vertices
    if n < 2:
        return 0.0
    _, labels = connected_components(csr_matrix(g.adjacency), directed=True, connection="weak")
    sizes = np.bincount(labels)
    return float(np.sum(sizes * (sizes - 1)) / (n * (n - 1)))


def gli(g: Graph) -> GliRecord:
    e, _ = edge_counts(g)
    cap = g.space.edge_capacity
    density = e / cap if cap else 0.0
    if g.space.directed:
        m, a, _ = _census_counts(g.adjacency)
    else:
        m, a = len([1 for i, j in g.edges() if i != j]), 0
    recip = 2 * m / (2 * m + a) if 2 * m + a > 0 else None
    return GliRecord(density, recip, connectedness(g))
