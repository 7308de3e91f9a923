"""Multi-channel topology: edges, the normal channel, coverage predicates."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from .geometry import NodeSet, distance

ALPHA_MIN, ALPHA_MAX = 1.0, 4.0


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not ALPHA_MIN <= alpha <= ALPHA_MAX:
        raise ValueError(f"alpha must lie in [{ALPHA_MIN:g}, {ALPHA_MAX:g}], got {alpha:g}")
    return alpha


def edge_weight(range_m: float, alpha: float) -> float:
    """Transmission power for ``range_m`` with unit normalising constant."""
    if range_m < 0:
        raise ValueError("range must be non-negative")
    return float(range_m) ** check_alpha(alpha)


@dataclass(frozen=True, order=True)
class Edge:
    a: int
    b: int
    range: float
    weight: float

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("self-loop")
        if self.a > self.b:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    @property
    def pair(self) -> tuple[int, int]:
        return (self.a, self.b)


def make_edge(a: int, b: int, range_m: float, alpha: float) -> Edge:
    return Edge(int(a), int(b), float(range_m), edge_weight(range_m, alpha))


def edge_arrays(edges: Sequence[Edge]) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Columns ``(a, b, range, weight)`` of an edge list."""
    if not edges:
        empty = np.empty(0)
        return empty.astype(np.int64), empty.astype(np.int64), empty, empty
    a = np.fromiter((e.a for e in edges), dtype=np.int64, count=len(edges))
    b = np.fromiter((e.b for e in edges), dtype=np.int64, count=len(edges))
    rng = np.fromiter((e.range for e in edges), dtype=float, count=len(edges))
    w = np.fromiter((e.weight for e in edges), dtype=float, count=len(edges))
    return a, b, rng, w


def pairs_within(xy: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All pairs ``i < j`` with distance <= ``radius``, sorted by ``(i, j)``.

    The KD-tree query is padded and then filtered with the same distance
    formula used everywhere else, so boundary pairs are decided consistently.
    """
    if len(xy) < 2 or radius < 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0)
    tree = cKDTree(xy)
    pairs = tree.query_pairs(radius * (1 + 1e-9) + 1e-12, output_type="ndarray")
    if len(pairs) == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0)
    pairs = np.sort(pairs.astype(np.int64), axis=1)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    i, j = pairs[order, 0], pairs[order, 1]
    d = np.hypot(xy[i, 0] - xy[j, 0], xy[i, 1] - xy[j, 1])
    keep = d <= radius
    return i[keep], j[keep], d[keep]


def build_normal_channel(nodes: NodeSet, r0: float, alpha: float) -> tuple[Edge, ...]:
    """Unit-disk graph at radius ``r0``; every edge costs ``r0**alpha``."""
    if not r0 > 0:
        raise ValueError("R0 must be positive")
    w = edge_weight(r0, alpha)
    i, j, _ = pairs_within(nodes.xy, r0)
    return tuple(Edge(int(a), int(b), float(r0), w) for a, b in zip(i, j))


def covered_by_node(c, a, range_a: float) -> bool:
    """True if point ``c`` lies within ``range_a`` of point ``a``."""
    return distance(a, c) <= range_a


def covered_by_edge(c, edge: Edge, nodes: NodeSet) -> bool:
    """True if point ``c`` is within ``edge.range`` of either endpoint."""
    return covered_by_node(c, nodes.xy[edge.a], edge.range) or covered_by_node(
        c, nodes.xy[edge.b], edge.range
    )


@dataclass(frozen=True, eq=False)
class Adjacency:
    """Symmetric CSR neighbour lists of the union graph.

    Every stored entry is one hop; ``weights`` holds the edge power.
    """

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.weights):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    def neighbors(self, v: int) -> list[tuple[int, float]]:
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.weights[lo:hi].tolist()))

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def matrix(self) -> sparse.csr_matrix:
        return sparse.csr_matrix(
            (self.weights.copy(), self.indices.copy(), self.indptr.copy()), shape=(self.n, self.n)
        )

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, eq=False)
class CompoundTopology:
    """Normal channel ``channels[0]`` plus short-cut channels ``channels[1:]``."""

    nodes: NodeSet
    r0: float
    alpha: float
    channels: tuple[tuple[Edge, ...], ...]

    @property
    def k(self) -> int:
        return len(self.channels) - 1

    @property
    def normal(self) -> tuple[Edge, ...]:
        return self.channels[0]

    @property
    def shortcut_channels(self) -> tuple[tuple[Edge, ...], ...]:
        return self.channels[1:]

    def edges(self) -> Iterable[Edge]:
        for channel in self.channels:
            yield from channel

    def edge_counts(self) -> list[int]:
        return [len(c) for c in self.channels]

    def sc_ratio(self) -> float:
        e0 = len(self.normal)
        sc = sum(len(c) for c in self.shortcut_channels)
        return sc / e0 if e0 else 0.0

    def prefix(self, k: int) -> "CompoundTopology":
        """The same topology restricted to channels ``0..k``."""
        if not 0 <= k <= self.k:
            raise ValueError(f"k must lie in [0, {self.k}]")
        return CompoundTopology(self.nodes, self.r0, self.alpha, self.channels[: k + 1])

    @cached_property
    def adjacency(self) -> Adjacency:
        return union_adjacency(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompoundTopology):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.r0 == other.r0
            and self.alpha == other.alpha
            and self.channels == other.channels
        )

    __hash__ = None

    def validate(self, radii_ratio: float | None = None) -> None:
        """Raise ``ValueError`` on the first broken structural invariant."""
        xy = self.nodes.xy
        seen: set[tuple[int, int]] = set()
        for idx, channel in enumerate(self.channels):
            for e in channel:
                d = distance(xy[e.a], xy[e.b])
                if e.pair in seen:
                    raise ValueError(f"pair {e.pair} repeated (channel {idx})")
                seen.add(e.pair)
                if e.range < d:
                    raise ValueError(f"edge {e.pair} range shorter than its length")
                if idx == 0 and (e.range != self.r0 or d > self.r0):
                    raise ValueError(f"normal edge {e.pair} violates R0")
                if idx > 0:
                    if not (d > self.r0 and d == e.range):
                        raise ValueError(f"short-cut {e.pair} length outside (R0, range]")
                    if radii_ratio is not None and d > self.r0 * radii_ratio:
                        raise ValueError(f"short-cut {e.pair} longer than R0*radii_ratio")
            if idx > 0:
                for e in channel:
                    for f in channel:
                        if e is f:
                            continue
                        if covered_by_edge(xy[e.a], f, self.nodes) or covered_by_edge(
                            xy[e.b], f, self.nodes
                        ):
                            raise ValueError(f"channel {idx}: {e.pair} covered by {f.pair}")


def union_adjacency(t: CompoundTopology) -> Adjacency:
    n = len(t.nodes)
    a, b, _, w = edge_arrays(list(t.edges()))
    rows = np.concatenate((a, b))
    cols = np.concatenate((b, a))
    vals = np.concatenate((w, w))
    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    np.cumsum(indptr, out=indptr)
    return Adjacency(indptr, cols.astype(np.int64), vals.astype(float))


def write_topology_csv(t: CompoundTopology, edges_path: Path | str, nodes_path: Path | str) -> None:
    """Dump edges ``(channel_index, node_a, node_b, range_m, weight)`` and nodes ``(id, x_m, y_m)``."""
    with open(edges_path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["channel_index", "node_a", "node_b", "range_m", "weight"])
        for idx, channel in enumerate(t.channels):
            for e in channel:
                out.writerow([idx, e.a, e.b, f"{e.range:.6f}", f"{e.weight:.6f}"])
    write_nodes_csv(t.nodes, nodes_path)


def write_nodes_csv(nodes: NodeSet, path: Path | str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["id", "x_m", "y_m"])
        for i, (x, y) in enumerate(nodes.xy):
            out.writerow([i, f"{x:.6f}", f"{y:.6f}"])
