"""Clustering, path-hop and path-length statistics of the union graph.

Hop count and length of a node pair are read off one canonical path. Two
orders are supported:

``"length"`` (default)
    least total weight (power), ties broken by fewest hops.
``"hop"``
    fewest hops, ties broken by least total weight.

With a single edge weight (no short-cuts) both orders pick the same paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import heapq

import numpy as np
from numba import njit

from .topology import Adjacency, CompoundTopology


@njit(cache=True, nogil=True)
def _lex_bfs(indptr, indices, weights, source, hop, length, queue):
    # Level-order BFS; a node's length is final once it is dequeued because
    # all of its predecessors sit one level up and were dequeued earlier.
    hop[:] = -1
    hop[source] = 0
    length[source] = 0.0
    queue[0] = source
    head, tail = 0, 1
    while head < tail:
        u = queue[head]
        head += 1
        next_hop = hop[u] + 1
        base = length[u]
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            cand = base + weights[p]
            if hop[v] == -1:
                hop[v] = next_hop
                length[v] = cand
                queue[tail] = v
                tail += 1
            elif hop[v] == next_hop and cand < length[v]:
                length[v] = cand


@njit(cache=True, nogil=True)
def _lex_dijkstra(indptr, indices, weights, source, hop, length, done):
    hop[:] = -1
    done[:] = False
    hop[source] = 0
    length[source] = 0.0
    heap = [(0.0, 0, source)]
    while heap:
        d, h, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if done[v]:
                continue
            cand = d + weights[p]
            if hop[v] == -1 or cand < length[v] or (cand == length[v] and h + 1 < hop[v]):
                hop[v] = h + 1
                length[v] = cand
                heapq.heappush(heap, (cand, h + 1, v))


@njit(cache=True, nogil=True)
def _single_source(indptr, indices, weights, source, by_length, hop, length):
    n = len(indptr) - 1
    if by_length:
        _lex_dijkstra(indptr, indices, weights, source, hop, length, np.empty(n, dtype=np.bool_))
    else:
        _lex_bfs(indptr, indices, weights, source, hop, length, np.empty(n, dtype=np.int64))


@njit(cache=True, nogil=True)
def _path_totals(indptr, indices, weights, by_length):
    n = len(indptr) - 1
    hop = np.empty(n, dtype=np.int64)
    length = np.empty(n, dtype=np.float64)
    queue = np.empty(n, dtype=np.int64)
    done = np.empty(n, dtype=np.bool_)
    hop_sum = 0
    length_sum = 0.0
    max_hop = 0
    max_length = 0.0
    pairs = 0
    for s in range(n):
        if by_length:
            _lex_dijkstra(indptr, indices, weights, s, hop, length, done)
        else:
            _lex_bfs(indptr, indices, weights, s, hop, length, queue)
        for t in range(s + 1, n):
            h = hop[t]
            if h > 0:
                pairs += 1
                hop_sum += h
                length_sum += length[t]
                if h > max_hop:
                    max_hop = h
                if length[t] > max_length:
                    max_length = length[t]
    return pairs, hop_sum, length_sum, max_hop, max_length


def _arrays(adj: Adjacency):
    return (
        np.ascontiguousarray(adj.indptr, dtype=np.int64),
        np.ascontiguousarray(adj.indices, dtype=np.int64),
        np.ascontiguousarray(adj.weights, dtype=np.float64),
    )


PATH_ORDERS = ("length", "hop")


def _by_length(order: str) -> bool:
    if order not in PATH_ORDERS:
        raise ValueError(f"unknown path order {order!r}; expected one of {PATH_ORDERS}")
    return order == "length"


def shortest_paths_from(
    t: CompoundTopology, source: int, order: str = "length"
) -> dict[int, tuple[int, float]]:
    """``{target: (hop, length)}`` for every node reachable from ``source``."""
    indptr, indices, weights = _arrays(t.adjacency)
    n = len(indptr) - 1
    hop = np.empty(n, dtype=np.int64)
    length = np.empty(n, dtype=np.float64)
    _single_source(indptr, indices, weights, int(source), _by_length(order), hop, length)
    return {int(v): (int(hop[v]), float(length[v])) for v in np.flatnonzero(hop > 0)}


def clustering_coefficient(t: CompoundTopology) -> float:
    """Mean local clustering; nodes of degree < 2 count as 0."""
    n = len(t.nodes)
    if n == 0:
        return 0.0
    adj = t.adjacency.matrix()
    adj.data = np.ones_like(adj.data)
    deg = np.asarray(adj.sum(axis=1)).ravel()
    links = np.asarray((adj @ adj).multiply(adj).sum(axis=1)).ravel() / 2.0
    local = np.zeros(n)
    ok = deg >= 2
    local[ok] = links[ok] / (deg[ok] * (deg[ok] - 1) / 2.0)
    return float(local.sum() / n)


@dataclass(frozen=True)
class MetricsReport:
    """Path metrics are ``None`` when no pair of nodes is connected."""

    clustering: float
    char_hop: float | None
    max_hop: int | None
    char_length: float | None
    max_length: float | None
    connected_pairs: int
    per_channel_edges: tuple[int, ...] = field(default=())
    cumulative_sc_ratio: float = 0.0

    @property
    def k(self) -> int:
        return len(self.per_channel_edges) - 1

    def value(self, name: str):
        return getattr(self, METRIC_FIELDS[name])


# Short names used in CSV output and sweep series.
METRIC_FIELDS = {
    "C": "clustering",
    "H": "char_hop",
    "M": "max_hop",
    "L": "char_length",
    "m": "max_length",
}


def characteristic_metrics(t: CompoundTopology, order: str = "length") -> MetricsReport:
    """Means and maxima over connected unordered pairs, plus clustering.

    Pair values are taken from the lower-numbered endpoint's search and
    accumulated in source order, so results are bit-reproducible.
    """
    by_length = _by_length(order)
    pairs, hop_sum, length_sum, max_hop, max_length = _path_totals(*_arrays(t.adjacency), by_length)
    clustering = clustering_coefficient(t)
    counts = tuple(t.edge_counts())
    if pairs == 0:
        return MetricsReport(clustering, None, None, None, None, 0, counts, t.sc_ratio())
    return MetricsReport(
        clustering=clustering,
        char_hop=hop_sum / pairs,
        max_hop=int(max_hop),
        char_length=length_sum / pairs,
        max_length=float(max_length),
        connected_pairs=int(pairs),
        per_channel_edges=counts,
        cumulative_sc_ratio=t.sc_ratio(),
    )
