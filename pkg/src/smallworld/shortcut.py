"""Random-greedy construction of interference-free short-cut channels.

A short-cut channel is grown one link at a time. Each new link is drawn
uniformly from the pairs that are (1) not yet linked on any channel,
(2) compatible with every link already on the channel under construction,
and (3) longer than ``R0`` but no longer than ``R0 * radii_ratio``. The
channel is finished when no such pair remains.

Two links ``e`` and ``f`` on one channel are compatible when no terminal of
either is covered by the other, which reduces to::

    min cross-terminal distance > max(range_e, range_f)

Short-cut links transmit at exactly their own length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .geometry import NodeSet
from .topology import CompoundTopology, Edge, build_normal_channel, make_edge, pairs_within

# Stream tag for short-cut sampling; see geometry._NODE_STREAM.
_SHORTCUT_STREAM = 1


@dataclass(frozen=True)
class ShortcutParams:
    radii_ratio: float = 5.0
    max_channels: int = 0
    rng_seed: int = 0

    def __post_init__(self):
        if not self.radii_ratio > 1:
            raise ValueError("radii_ratio must exceed 1")
        if self.max_channels < 0:
            raise ValueError("max_channels must be non-negative")


@dataclass
class CandidatePool:
    """Pairs with ``R0 < distance <= R0 * radii_ratio``, sorted by ``(a, b)``.

    Built once per node set and length bound and shared by every channel.
    """

    xy: np.ndarray
    a: np.ndarray
    b: np.ndarray
    length: np.ndarray

    @classmethod
    def build(cls, nodes: NodeSet, r0: float, radii_ratio: float) -> "CandidatePool":
        i, j, d = pairs_within(nodes.xy, r0 * radii_ratio)
        keep = d > r0
        return cls(nodes.xy, i[keep], j[keep], d[keep])

    def __len__(self) -> int:
        return len(self.a)

    def without(self, established: Iterable[tuple[int, int]]) -> "CandidatePool":
        n = len(self.xy)
        keys = self.a * n + self.b
        taken = np.fromiter((min(p) * n + max(p) for p in established), dtype=np.int64)
        keep = ~np.isin(keys, taken)
        return CandidatePool(self.xy, self.a[keep], self.b[keep], self.length[keep])

    def compatible_with(self, a: int, b: int, range_m: float) -> np.ndarray:
        """Mask of candidates that may share a channel with link ``(a, b)``."""
        xy = self.xy
        pa, pb = xy[self.a], xy[self.b]
        cross = np.minimum.reduce(
            [
                np.hypot(pa[:, 0] - xy[a, 0], pa[:, 1] - xy[a, 1]),
                np.hypot(pa[:, 0] - xy[b, 0], pa[:, 1] - xy[b, 1]),
                np.hypot(pb[:, 0] - xy[a, 0], pb[:, 1] - xy[a, 1]),
                np.hypot(pb[:, 0] - xy[b, 0], pb[:, 1] - xy[b, 1]),
            ]
        )
        return cross > np.maximum(self.length, range_m)

    def subset(self, mask: np.ndarray) -> "CandidatePool":
        return CandidatePool(self.xy, self.a[mask], self.b[mask], self.length[mask])


def candidate_pairs(
    nodes: NodeSet,
    established: Iterable[tuple[int, int]],
    sc_edges: Iterable[Edge],
    r0: float,
    radii_ratio: float,
) -> set[tuple[int, int]]:
    """Pairs that could be added to the channel holding ``sc_edges`` right now."""
    pool = CandidatePool.build(nodes, r0, radii_ratio).without(established)
    for e in sc_edges:
        pool = pool.subset(pool.compatible_with(e.a, e.b, e.range))
    return set(zip(pool.a.tolist(), pool.b.tolist()))


def build_sc_channel(
    nodes: NodeSet,
    established: set[tuple[int, int]],
    r0: float,
    radii_ratio: float,
    rng: np.random.Generator,
    *,
    alpha: float = 1.0,
    pool: CandidatePool | None = None,
) -> tuple[Edge, ...]:
    """Grow one maximal short-cut channel.

    Every chosen pair is also added to ``established`` so the next channel
    sees it. ``pool`` may be passed to reuse a precomputed candidate pool
    built for the same ``r0`` and ``radii_ratio``.
    """
    if pool is None:
        pool = CandidatePool.build(nodes, r0, radii_ratio)
    live = pool.without(established)
    chosen = []
    while len(live):
        pick = int(rng.integers(len(live)))
        a, b, length = int(live.a[pick]), int(live.b[pick]), float(live.length[pick])
        chosen.append(make_edge(a, b, length, alpha))
        established.add((a, b))
        live = live.subset(live.compatible_with(a, b, length))
    return tuple(chosen)


def shortcut_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), _SHORTCUT_STREAM])


def build_compound(
    nodes: NodeSet,
    r0: float,
    alpha: float,
    params: ShortcutParams,
    *,
    normal: tuple[Edge, ...] | None = None,
) -> CompoundTopology:
    """Normal channel followed by ``params.max_channels`` short-cut channels.

    ``normal`` lets callers reuse an already built normal channel.
    """
    if normal is None:
        normal = build_normal_channel(nodes, r0, alpha)
    channels = [normal]
    if params.max_channels:
        rng = shortcut_rng(params.rng_seed)
        pool = CandidatePool.build(nodes, r0, params.radii_ratio)
        established = {e.pair for e in normal}
        for _ in range(params.max_channels):
            channels.append(
                build_sc_channel(nodes, established, r0, params.radii_ratio, rng, alpha=alpha, pool=pool)
            )
    return CompoundTopology(nodes, float(r0), float(alpha), tuple(channels))
