"""Thresholded dependence graphs over component processes, with DOT/JSON export."""
from __future__ import annotations

import json
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .partial import EdgeStatisticMatrix

JSON_SCHEMA_VERSION = 1


@dataclass(frozen=True, eq=False)
class DependenceGraph:
    """Vertices are type ids 0..d-1 (named); edges are pairs i < j with weight > alpha."""

    names: tuple[str, ...]
    edges: dict[tuple[int, int], float]
    alpha: float
    statistics: np.ndarray | None = None

    def __post_init__(self):
        for (i, j), w in self.edges.items():
            if not (0 <= i < j < len(self.names)):
                raise ValueError(f"edge ({i}, {j}) must satisfy 0 <= i < j < d")
            if not w > self.alpha:
                raise ValueError(f"edge ({i}, {j}) has weight {w} <= alpha {self.alpha}")

    @property
    def vertices(self) -> list[tuple[int, str]]:
        return list(enumerate(self.names))

    @property
    def edge_set(self) -> set[frozenset[int]]:
        return {frozenset(e) for e in self.edges}

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.names)))
        g.add_weighted_edges_from((i, j, w) for (i, j), w in self.edges.items())
        return g

    def __eq__(self, other):
        if not isinstance(other, DependenceGraph):
            return NotImplemented
        same_stats = (self.statistics is None and other.statistics is None) or (
            self.statistics is not None and other.statistics is not None
            and np.array_equal(self.statistics, other.statistics)
        )
        return (self.names == other.names and self.edges == other.edges
                and self.alpha == other.alpha and same_stats)


def build_msdgm(stats: EdgeStatisticMatrix, alpha: float, names=None) -> DependenceGraph:
    """Keep pair {i, j} exactly when its statistic is strictly above ``alpha``."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    names = tuple(stats.type_names if names is None else names)
    S = stats.values
    d = len(names)
    edges = {(i, j): float(S[i, j]) for i in range(d) for j in range(i + 1, d) if S[i, j] > alpha}
    return DependenceGraph(names, edges, float(alpha), S.copy())


def _check_vertex(graph: DependenceGraph, v: int) -> None:
    if not 0 <= v < len(graph.names):
        raise KeyError(f"unknown vertex {v}")


def neighborhood(graph: DependenceGraph, v: int) -> set[int]:
    _check_vertex(graph, v)
    return set(graph.to_networkx().neighbors(v))


def connected_components(graph: DependenceGraph) -> list[set[int]]:
    """Components ordered by their smallest vertex."""
    comps = nx.connected_components(graph.to_networkx())
    return sorted((set(c) for c in comps), key=min)


def component_census(graph: DependenceGraph) -> dict[int, int]:
    """Number of components of each size, e.g. {1: 13, 2: 2, ...}."""
    sizes: dict[int, int] = {}
    for c in connected_components(graph):
        sizes[len(c)] = sizes.get(len(c), 0) + 1
    return dict(sorted(sizes.items()))


def is_separator(graph: DependenceGraph, S, i: int, j: int) -> bool:
    """True when removing ``S`` leaves no path between ``i`` and ``j``."""
    S = set(S)
    for v in (i, j, *S):
        _check_vertex(graph, v)
    if i == j or i in S or j in S:
        raise ValueError("need distinct i, j outside the separating set")
    g = graph.to_networkx()
    g.remove_nodes_from(S)
    return not nx.has_path(g, i, j)


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: DependenceGraph) -> str:
    lines = [f"graph msdgm {{", f"  // alpha={graph.alpha!r}"]
    for v, name in graph.vertices:
        lines.append(f"  {v} [label={_dot_id(name)}];")
    for (i, j), w in sorted(graph.edges.items()):
        lines.append(f"  {i} -- {j} [weight={w!r}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(graph: DependenceGraph) -> str:
    doc = {
        "version": JSON_SCHEMA_VERSION,
        "alpha": graph.alpha,
        "vertices": [{"id": v, "name": n} for v, n in graph.vertices],
        "edges": [{"source": i, "target": j, "weight": w} for (i, j), w in sorted(graph.edges.items())],
        "statistics": None if graph.statistics is None else graph.statistics.tolist(),
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def from_json(text: str) -> DependenceGraph:
    doc = json.loads(text)
    if doc.get("version") != JSON_SCHEMA_VERSION:
        raise ValueError(f"unsupported graph JSON version {doc.get('version')!r}")
    verts = sorted(doc["vertices"], key=lambda v: v["id"])
    if [v["id"] for v in verts] != list(range(len(verts))):
        raise ValueError("vertex ids must be 0..d-1")
    edges = {}
    for e in doc["edges"]:
        i, j = sorted((e["source"], e["target"]))
        edges[(i, j)] = float(e["weight"])
    stats = doc.get("statistics")
    return DependenceGraph(tuple(v["name"] for v in verts), edges, float(doc["alpha"]),
                           None if stats is None else np.array(stats, dtype=float))


def export_graph(graph: DependenceGraph, format: str = "json") -> str:
    if format == "dot":
        return to_dot(graph)
    if format == "json":
        return to_json(graph)
    raise ValueError(f"unknown format {format!r}; use 'dot' or 'json'")
