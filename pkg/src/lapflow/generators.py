"""Random graph families and small named graphs used by tests and scripts."""

from __future__ import annotations

import numpy as np

from .netmodel import ComplexGraph, build_graph

FIVE_NODE_SPECTRUM = np.array([0, 3.67 + 5.14j, 5 + 5j, 6.32 - 0.14j, 7 + 1j])
FIVE_NODE_PINV_SPECTRUM = np.array([0, 0.091 - 0.128j, 0.1 - 0.1j, 0.16 + 0.003j, 0.14 - 0.02j])


def _unsigned_weight(rng: np.random.Generator) -> complex:
    return complex(rng.uniform(0.05, 1.0), rng.uniform(0.0, 1.0))


def _tree_edges(rng: np.random.Generator, n: int) -> set[tuple[int, int]]:
    order = rng.permutation(n)
    return {
        tuple(sorted((int(order[k]), int(order[rng.integers(0, k)]))))
        for k in range(1, n)
    }


def _undirected_support(rng: np.random.Generator, n: int, density: float) -> list[tuple[int, int]]:
    edges = _tree_edges(rng, n)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                edges.add((i, j))
    return sorted(edges)


def random_unsigned_undirected(rng: np.random.Generator, n: int, density: float = 0.3) -> ComplexGraph:
    """Connected undirected graph with weights Re > 0, Im >= 0."""
    edges = [(i, j, _unsigned_weight(rng)) for i, j in _undirected_support(rng, n, density)]
    return build_graph(n, False, edges)


def random_signed_undirected(rng: np.random.Generator, n: int, density: float = 0.3) -> ComplexGraph:
    """Connected undirected graph with at least one weight outside the non-negative quadrant.

    Real parts are mostly positive, so the family mixes rEEP and non-rEEP cases.
    """
    support = _undirected_support(rng, n, density)
    while True:
        edges = []
        for i, j in support:
            re = rng.uniform(-0.6, 1.0)
            im = rng.uniform(-1.0, 1.0)
            edges.append((i, j, complex(re if re != 0 else 0.5, im)))
        if any(w.real < 0 or w.imag < 0 for _, _, w in edges):
            return build_graph(n, False, edges)


def random_balanced_digraph(rng: np.random.Generator, n: int, extra_cycles: int | None = None) -> ComplexGraph:
    """Strongly connected weight-balanced digraph with unsigned complex weights.

    Built as a sum of directed cycles (a Hamiltonian one guarantees strong
    connectivity); each cycle carries one constant weight, which keeps every
    node's in- and out-degree equal.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if extra_cycles is None:
        extra_cycles = int(rng.integers(0, 4))
    A = np.zeros((n, n), dtype=complex)
    cycles = [rng.permutation(n)]
    for _ in range(extra_cycles):
        cycles.append(rng.permutation(n)[: rng.integers(2, n + 1)])
    for cyc in cycles:
        w = _unsigned_weight(rng)
        for a, b in zip(cyc, np.roll(cyc, -1)):
            A[a, b] += w
    edges = [(i, j, A[i, j]) for i in range(n) for j in range(n) if A[i, j] != 0]
    return build_graph(n, True, edges)


def path_graph(n: int, weight: complex = 1, directed: bool = False) -> ComplexGraph:
    return build_graph(n, directed, [(k, k + 1, weight) for k in range(n - 1)])


def cycle_graph(n: int, weight: complex = 1, directed: bool = True) -> ComplexGraph:
    return build_graph(n, directed, [(k, (k + 1) % n, weight) for k in range(n)])


def two_components(weight: complex = 1) -> ComplexGraph:
    """Two disjoint edges 0-1 and 2-3."""
    return build_graph(4, False, [(0, 1, weight), (2, 3, weight)])


def realize_spectrum(spectrum) -> np.ndarray:
    """Normal matrix ``F diag(spectrum) F^H`` with ``F`` the unitary DFT.

    The first DFT column is the normalized ones vector, so if
    ``spectrum[0] == 0`` the result has zero row and column sums.
    """
    w = np.asarray(spectrum, dtype=complex)
    n = w.size
    F = np.exp(2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n) / np.sqrt(n)
    return (F * w) @ F.conj().T
