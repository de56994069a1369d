"""JSON readers and writers for graph sets and observation sets.

Graph-set files look like::

    {"directed": true, "loops": false,
     "graphs": [{"n": 3, "edges": [[1, 2], [2, 3]]}]}

with 1-indexed vertices. Undirected graphs list each edge once.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ParseError, SupportViolationError
from .fitting import GraphSet
from .graphs import Graph, GraphSpace
from .netinf import ObservationSet


def graphset_from_dict(doc) -> GraphSet:
    if not isinstance(doc, dict):
        raise ParseError("graph-set file must hold a JSON object")
    directed = doc.get("directed", True)
    loops = doc.get("loops", False)
    if not isinstance(directed, bool) or not isinstance(loops, bool):
        raise ParseError("'directed' and 'loops' must be booleans")
    graphs = doc.get("graphs")
    if not isinstance(graphs, list):
        raise ParseError("'graphs' must be a list")
    if not graphs:
        raise ParseError("'graphs' is empty; a graph set needs at least one graph")
    out = []
    for k, entry in enumerate(graphs, start=1):
        if not isinstance(entry, dict) or "n" not in entry:
            raise ParseError(f"graph {k} needs an 'n' field")
        n = entry["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ParseError(f"graph {k}: 'n' must be a positive integer, got {n!r}")
        if "directed" in entry and entry["directed"] != directed:
            raise ParseError(f"graph {k} has directed={entry['directed']}, the set has directed={directed}")
        space = GraphSpace(n, directed=directed, loops=loops)
        edges = entry.get("edges", [])
        pairs = []
        for e in edges:
            if not isinstance(e, (list, tuple)) or len(e) != 2 or not all(isinstance(v, int) for v in e):
                raise ParseError(f"graph {k}: edge {e!r} is not a pair of integers")
            i, j = e
            if not (1 <= i <= n and 1 <= j <= n):
                raise SupportViolationError(f"graph {k}: cell ({i},{j}) lies outside 1..{n}")
            if i == j and not loops:
                raise SupportViolationError(f"graph {k}: loop at cell ({i},{j}) under a loopless policy")
            pairs.append((i - 1, j - 1))
        out.append(Graph.from_edges(space, pairs))
    return GraphSet(out)


def graphset_to_dict(gs: GraphSet) -> dict:
    graphs = []
    for g in gs:
        edges = [[int(i) + 1, int(j) + 1] for i, j in g.edges()]
        graphs.append({"n": g.space.n_vertices, "edges": edges})
    return {"directed": gs.directed, "loops": gs.loops, "graphs": graphs}


def load_graphset(path) -> GraphSet:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    return graphset_from_dict(doc)


def save_graphset(gs: GraphSet, path) -> None:
    Path(path).write_text(json.dumps(graphset_to_dict(gs)) + "\n")


def load_observations(path) -> ObservationSet:
    try:
        return ObservationSet.from_json(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc


def save_observations(obs: ObservationSet, path) -> None:
    Path(path).write_text(obs.to_json() + "\n")
