"""Complex-weighted graphs and their structural classification."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

BALANCE_TOL = 1e-9


class GraphError(ValueError):
    pass


class GraphClass(str, enum.Enum):
    UNSIGNED_UNDIRECTED = "UnsignedUndirected"
    SIGNED_UNDIRECTED = "SignedUndirected"
    UNSIGNED_DIGRAPH = "UnsignedDigraph"
    SIGNED_DIGRAPH = "SignedDigraph"

    @property
    def directed(self) -> bool:
        return self in (GraphClass.UNSIGNED_DIGRAPH, GraphClass.SIGNED_DIGRAPH)

    @property
    def signed(self) -> bool:
        return self in (GraphClass.SIGNED_UNDIRECTED, GraphClass.SIGNED_DIGRAPH)


@dataclass(frozen=True)
class ComplexGraph:
    """Weighted graph; ``edges`` holds ordered triples (from, to, weight).

    For undirected graphs both orientations of every edge are stored.
    Weight ``a_ij`` is the weight of edge i -> j and contributes to the
    out-degree of node i.
    """

    n: int
    directed: bool
    edges: tuple[tuple[int, int, complex], ...]
    node_labels: tuple[str, ...] | None = None

    @property
    def undirected_edges(self) -> list[tuple[int, int, complex]]:
        if self.directed:
            raise GraphError("graph is directed")
        return [e for e in self.edges if e[0] < e[1]]


def build_graph(
    n: int,
    directed: bool,
    edges: Iterable[Sequence],
    node_labels: Sequence[str] | None = None,
) -> ComplexGraph:
    """Validate an edge list and return a canonical graph.

    Undirected edge lists may give each edge once or in both orientations
    (with identical weights); the symmetric closure is stored.
    """
    if int(n) != n or n < 1:
        raise GraphError(f"node count must be a positive integer, got {n!r}")
    n = int(n)
    if node_labels is not None:
        node_labels = tuple(str(s) for s in node_labels)
        if len(node_labels) != n:
            raise GraphError(f"expected {n} node labels, got {len(node_labels)}")

    given: dict[tuple[int, int], complex] = {}
    for k, edge in enumerate(edges):
        if len(edge) != 3:
            raise GraphError(f"edge {k}: expected (from, to, weight)")
        i, j, w = edge
        if int(i) != i or int(j) != j:
            raise GraphError(f"edge {k}: endpoints must be integers")
        i, j, w = int(i), int(j), complex(w)
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge {k}: endpoint out of range for n={n}: ({i}, {j})")
        if i == j:
            raise GraphError(f"edge {k}: self-loop at node {i}")
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            raise GraphError(f"edge {k}: non-finite weight {w}")
        if w == 0:
            raise GraphError(f"edge {k}: zero weight (omit the edge instead)")
        if (i, j) in given:
            raise GraphError(f"edge {k}: duplicate edge ({i}, {j})")
        given[(i, j)] = w

    if not directed:
        closure = dict(given)
        for (i, j), w in given.items():
            back = given.get((j, i))
            if back is not None and back != w:
                raise GraphError(f"asymmetric weights on undirected edge ({i}, {j}): {w} vs {back}")
            closure[(j, i)] = w
        given = closure

    ordered = tuple((i, j, given[(i, j)]) for (i, j) in sorted(given))
    return ComplexGraph(n=n, directed=bool(directed), edges=ordered, node_labels=node_labels)


def adjacency(G: ComplexGraph) -> np.ndarray:
    A = np.zeros((G.n, G.n), dtype=complex)
    for i, j, w in G.edges:
        A[i, j] = w
    return A


def ordered_row_sums(M: np.ndarray) -> np.ndarray:
    """Row sums accumulated strictly left to right over columns.

    This is the one summation order used for degrees and Laplacian
    diagonals, which makes zero row sums exact under the same order.
    """
    return np.cumsum(M, axis=1)[:, -1]


def out_degree_matrix(G: ComplexGraph) -> np.ndarray:
    return np.diag(ordered_row_sums(adjacency(G)))


@dataclass(frozen=True)
class StructureReport:
    graph_class: GraphClass
    connected: bool  # strong connectivity for digraphs
    weight_balanced: bool
    component_count: int  # strongly connected components for digraphs

    @property
    def strongly_connected(self) -> bool:
        return self.connected


def strongly_connected_components(n: int, succ: Sequence[Sequence[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative. Components come out in reverse topological order."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            nbrs = succ[v]
            while pos < len(nbrs):
                w = nbrs[pos]
                pos += 1
                if index[w] == -1:
                    work.append((v, pos))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def _successors(G: ComplexGraph) -> list[list[int]]:
    succ: list[list[int]] = [[] for _ in range(G.n)]
    for i, j, w in G.edges:
        if abs(w) > 0:
            succ[i].append(j)
    return succ


def classify(G: ComplexGraph) -> StructureReport:
    unsigned = all(w.real >= 0 and w.imag >= 0 for _, _, w in G.edges)
    if G.directed:
        gclass = GraphClass.UNSIGNED_DIGRAPH if unsigned else GraphClass.SIGNED_DIGRAPH
    else:
        gclass = GraphClass.UNSIGNED_UNDIRECTED if unsigned else GraphClass.SIGNED_UNDIRECTED

    comps = strongly_connected_components(G.n, _successors(G))
    if G.directed:
        A = adjacency(G)
        imbalance = np.abs(A.sum(axis=1) - A.sum(axis=0)).max()
        scale = max(1.0, float(np.abs(A).sum(axis=1).max()))
        balanced = bool(imbalance <= BALANCE_TOL * scale)
    else:
        balanced = True
    return StructureReport(
        graph_class=gclass,
        connected=len(comps) == 1,
        weight_balanced=balanced,
        component_count=len(comps),
    )
