"""Undirected transaction networks and their generators.

Vertices are 0-based contiguous integers.  Generators that distinguish a
"core" (mixed_core, octopus) place core vertices first, so analyses can
slice core vs. periphery without extra bookkeeping.  Every generator is a
pure function of its parameters and seed.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError
from .seeding import stream_generator


@dataclass(frozen=True)
class Network:
    """Immutable simple undirected graph: edge list plus degree array.

    ``edges`` has shape (E, 2) with u < v per row, rows sorted
    lexicographically.  ``degree[i]`` counts the edges incident to i, so
    ``degree.sum() == 2 * len(edges)``.
    """

    n: int
    edges: np.ndarray
    degree: np.ndarray

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency matrix in CSR form."""
        if len(self.edges) == 0:
            return sp.csr_matrix((self.n, self.n))
        u, v = self.edges[:, 0], self.edges[:, 1]
        row = np.concatenate([u, v])
        col = np.concatenate([v, u])
        data = np.ones(len(row))
        return sp.csr_matrix((data, (row, col)), shape=(self.n, self.n))

    @cached_property
    def degree_max(self) -> int:
        return int(self.degree.max()) if self.n else 0

    def neighbor_sums(self, x: np.ndarray) -> np.ndarray:
        """Per-vertex sum of ``x`` over neighbors (A @ x)."""
        return self.adjacency @ x


def _network_from_edges(n: int, edges: np.ndarray) -> Network:
    """Validate and canonicalize an edge array into a Network."""
    if n < 0:
        raise ParameterError("vertex count must be nonnegative")
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(edges):
        if edges.min() < 0 or edges.max() >= n:
            raise ParameterError("edge endpoint out of range")
        u = edges.min(axis=1)
        v = edges.max(axis=1)
        if np.any(u == v):
            raise ParameterError("self-loops are not allowed")
        edges = np.stack([u, v], axis=1)
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
        dup = np.all(edges[1:] == edges[:-1], axis=1)
        if np.any(dup):
            raise ParameterError("duplicate edges are not allowed")
    degree = np.zeros(n, dtype=np.int64)
    if len(edges):
        degree = np.bincount(edges.ravel(), minlength=n).astype(np.int64)
    return Network(n=n, edges=edges, degree=degree)


# ---------------------------------------------------------------------------
# Topology specifications


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ParameterError(msg)


@dataclass(frozen=True)
class Complete:
    n: int
    seed: int = 0

    def validate(self) -> None:
        _check(self.n > 0, "Complete: n must be positive")


@dataclass(frozen=True)
class ErdosRenyi:
    n: int
    p_link: float
    seed: int = 0

    def validate(self) -> None:
        _check(self.n > 0, "ErdosRenyi: n must be positive")
        _check(0.0 <= self.p_link <= 1.0, "ErdosRenyi: p_link must be in [0, 1]")


@dataclass(frozen=True)
class RingLattice:
    n: int
    q: int
    seed: int = 0

    def validate(self) -> None:
        _check(self.n > 0, "RingLattice: n must be positive")
        _check(self.q >= 1, "RingLattice: q must be >= 1")
        _check(2 * self.q < self.n, "RingLattice: 2q must be < n")


@dataclass(frozen=True)
class WattsStrogatz:
    n: int
    q: int
    p_rewire: float
    seed: int = 0

    def validate(self) -> None:
        RingLattice(self.n, self.q).validate()
        _check(0.0 <= self.p_rewire <= 1.0, "WattsStrogatz: p_rewire must be in [0, 1]")


@dataclass(frozen=True)
class BarabasiAlbert:
    n: int
    m0: int
    m: int
    seed: int = 0

    def validate(self) -> None:
        _check(self.m >= 1, "BarabasiAlbert: m must be >= 1")
        _check(self.m <= self.m0, "BarabasiAlbert: m must be <= m0")
        _check(self.m0 < self.n, "BarabasiAlbert: m0 must be < n")


@dataclass(frozen=True)
class MixedCore:
    n: int
    m_core: int
    seed: int = 0

    def validate(self) -> None:
        _check(self.n > 0, "MixedCore: n must be positive")
        _check(0 <= self.m_core <= self.n, "MixedCore: m_core must be in [0, n]")


@dataclass(frozen=True)
class Octopus:
    n: int
    m_core: int
    p_core: float = 0.5
    seed: int = 0

    def validate(self) -> None:
        _check(self.n > 0, "Octopus: n must be positive")
        _check(1 <= self.m_core <= self.n, "Octopus: m_core must be in [1, n]")
        _check(0.0 <= self.p_core <= 1.0, "Octopus: p_core must be in [0, 1]")


TopologySpec = (
    Complete | ErdosRenyi | RingLattice | WattsStrogatz | BarabasiAlbert | MixedCore | Octopus
)


def build(spec: TopologySpec) -> Network:
    """Build the network described by ``spec``; deterministic given the spec."""
    spec.validate()
    if isinstance(spec, Complete):
        return complete(spec.n)
    if isinstance(spec, ErdosRenyi):
        return erdos_renyi(spec.n, spec.p_link, spec.seed)
    if isinstance(spec, RingLattice):
        return ring_lattice(spec.n, spec.q)
    if isinstance(spec, WattsStrogatz):
        return watts_strogatz(spec.n, spec.q, spec.p_rewire, spec.seed)
    if isinstance(spec, BarabasiAlbert):
        return barabasi_albert(spec.n, spec.m0, spec.m, spec.seed)
    if isinstance(spec, MixedCore):
        return mixed_core(spec.n, spec.m_core)
    if isinstance(spec, Octopus):
        return octopus(spec.n, spec.m_core, spec.p_core, spec.seed)
    raise ParameterError(f"unknown topology spec {spec!r}")


# ---------------------------------------------------------------------------
# Generators


def complete(n: int) -> Network:
    Complete(n).validate()
    u, v = np.triu_indices(n, k=1)
    return _network_from_edges(n, np.stack([u, v], axis=1))


def empty(n: int) -> Network:
    return _network_from_edges(n, np.empty((0, 2), dtype=np.int64))


def erdos_renyi(n: int, p_link: float, seed: int = 0) -> Network:
    """Random graph: each unordered pair linked independently with p_link."""
    ErdosRenyi(n, p_link).validate()
    rng = stream_generator(seed, 0)
    chunks = []
    for i in range(n - 1):
        hits = np.nonzero(rng.random(n - i - 1) < p_link)[0]
        if len(hits):
            pairs = np.empty((len(hits), 2), dtype=np.int64)
            pairs[:, 0] = i
            pairs[:, 1] = hits + i + 1
            chunks.append(pairs)
    edges = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    return _network_from_edges(n, edges)


def ring_lattice(n: int, q: int) -> Network:
    """Periodic ring where vertex i links to i+-1, ..., i+-q; all degrees 2q."""
    RingLattice(n, q).validate()
    i = np.arange(n, dtype=np.int64)
    rows = []
    for d in range(1, q + 1):
        j = (i + d) % n
        rows.append(np.stack([np.minimum(i, j), np.maximum(i, j)], axis=1))
    return _network_from_edges(n, np.concatenate(rows))


def watts_strogatz(n: int, q: int, p_rewire: float, seed: int = 0) -> Network:
    """Small-world rewiring of ring_lattice(n, q).

    Each ring edge is independently rewired with probability p_rewire: one
    end (chosen at random) is kept, the other moved to a fresh uniformly
    drawn vertex.  Draws that would create a self-loop or duplicate edge are
    rejected and re-drawn, so the edge count stays exactly n*q.
    """
    WattsStrogatz(n, q, p_rewire).validate()
    rng = stream_generator(seed, 0)
    i = np.arange(n, dtype=np.int64)
    ring = []
    for d in range(1, q + 1):
        ring.extend(zip(i.tolist(), ((i + d) % n).tolist()))
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in ring:
        adj[a].add(b)
        adj[b].add(a)
    edges = []
    for a, b in ring:
        if rng.random() >= p_rewire:
            edges.append((a, b))
            continue
        adj[a].discard(b)
        adj[b].discard(a)
        keep, other = (a, b) if rng.integers(2) == 0 else (b, a)
        if len(adj[keep]) >= n - 1:
            keep, other = other, keep
        if len(adj[keep]) >= n - 1:
            # both ends saturated; nothing to rewire to
            adj[a].add(b)
            adj[b].add(a)
            edges.append((a, b))
            continue
        while True:
            t = int(rng.integers(n))
            if t != keep and t not in adj[keep]:
                break
        adj[keep].add(t)
        adj[t].add(keep)
        edges.append((keep, t))
    return _network_from_edges(n, np.asarray(edges, dtype=np.int64))


def barabasi_albert(n: int, m0: int, m: int, seed: int = 0) -> Network:
    """Preferential-attachment growth from m0 initial isolated vertices.

    Each arriving vertex attaches m distinct edges to existing vertices with
    probability proportional to degree; while the total degree is still zero
    (the very first arrival) targets are drawn uniformly.  Final edge count
    is exactly (n - m0) * m.
    """
    BarabasiAlbert(n, m0, m).validate()
    rng = stream_generator(seed, 0)
    edges = []
    endpoints: list[int] = []  # each edge contributes both ends; sampling from
    # this list is sampling vertices proportionally to degree
    for v in range(m0, n):
        chosen: set[int] = set()
        if not endpoints:
            targets = rng.choice(v, size=m, replace=False)
            chosen.update(int(t) for t in targets)
        else:
            while len(chosen) < m:
                t = endpoints[int(rng.integers(len(endpoints)))]
                if t not in chosen:
                    chosen.add(t)
        for t in sorted(chosen):
            edges.append((t, v))
            endpoints.append(t)
            endpoints.append(v)
    return _network_from_edges(n, np.asarray(edges, dtype=np.int64))


def mixed_core(n: int, m_core: int) -> Network:
    """Complete graph on the first m_core vertices; the rest isolated."""
    MixedCore(n, m_core).validate()
    u, v = np.triu_indices(m_core, k=1)
    return _network_from_edges(n, np.stack([u, v], axis=1))


def octopus(n: int, m_core: int, p_core: float = 0.5, seed: int = 0) -> Network:
    """Random core of m_core vertices plus degree-1 tentacles.

    The core is erdos_renyi(m_core, p_core, seed) on vertices
    0..m_core-1; every remaining vertex gets exactly one edge to a uniformly
    chosen core vertex.
    """
    Octopus(n, m_core, p_core).validate()
    core = erdos_renyi(m_core, p_core, seed)
    rng = stream_generator(seed, 1)
    tentacles = np.empty((n - m_core, 2), dtype=np.int64)
    tentacles[:, 0] = rng.integers(m_core, size=n - m_core)
    tentacles[:, 1] = np.arange(m_core, n)
    edges = np.concatenate([core.edges, tentacles]) if n > m_core else core.edges
    return _network_from_edges(n, edges)


# ---------------------------------------------------------------------------
# Interrogation and I/O


@dataclass(frozen=True)
class DegreeDistribution:
    """Histogram of vertex degrees: counts[k] = number of vertices of degree k."""

    counts: np.ndarray

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.counts.sum()


def degree_distribution(net: Network) -> DegreeDistribution:
    counts = np.bincount(net.degree, minlength=1).astype(np.int64)
    return DegreeDistribution(counts=counts)


def write_edge_list(net: Network, path: str | Path) -> None:
    """Write the edge-list text format: `# n=<N>` header, then `u v` lines."""
    with open(path, "w") as fh:
        fh.write(f"# n={net.n}\n")
        for u, v in net.edges:
            fh.write(f"{u} {v}\n")


def read_edge_list(path: str | Path) -> Network:
    """Read the edge-list text format and validate the graph invariants."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# n="):
            raise ParameterError(f"{path}: missing '# n=<N>' header")
        try:
            n = int(header[4:])
        except ValueError as exc:
            raise ParameterError(f"{path}: bad vertex count in header") from exc
        pairs = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 2:
                raise ParameterError(f"{path}:{lineno}: expected 'u v'")
            u, v = int(fields[0]), int(fields[1])
            if not u < v:
                raise ParameterError(f"{path}:{lineno}: edges must satisfy u < v")
            pairs.append((u, v))
    return _network_from_edges(n, np.asarray(pairs, dtype=np.int64).reshape(-1, 2))
