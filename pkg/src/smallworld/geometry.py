"""Node layouts over a square deployment area.

Four layouts are supported: ``random`` (uniform), ``normal`` (truncated
Gaussian around the centre), ``skewed`` (mass pulled towards the origin
corner) and ``grid`` (corner-anchored lattice).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

DISTRIBUTIONS = ("random", "normal", "skewed", "grid")

# Stream tag mixed into the seed so node placement and short-cut sampling
# never share a random stream.
_NODE_STREAM = 0


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Immutable node positions. Node ``i`` sits at ``xy[i]``."""

    xy: np.ndarray
    area_side: float
    distribution: str
    seed: int
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        xy = np.array(self.xy, dtype=float, copy=True).reshape(-1, 2)
        xy.setflags(write=False)
        object.__setattr__(self, "xy", xy)

    def __len__(self) -> int:
        return len(self.xy)

    @property
    def nodes(self) -> list[tuple[int, float, float]]:
        return [(i, float(x), float(y)) for i, (x, y) in enumerate(self.xy)]

    def distance(self, a: int, b: int) -> float:
        return distance(self.xy[a], self.xy[b])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NodeSet):
            return NotImplemented
        return (
            self.distribution == other.distribution
            and self.area_side == other.area_side
            and self.seed == other.seed
            and np.array_equal(self.xy, other.xy)
        )

    __hash__ = None


def distance(a, b) -> float:
    """Euclidean distance between two points given as ``(x, y)``."""
    return float(np.hypot(a[0] - b[0], a[1] - b[1]))


def pairwise_distances(xy: np.ndarray) -> np.ndarray:
    """Dense ``n x n`` distance matrix, computed the same way as :func:`distance`."""
    return np.hypot(xy[:, None, 0] - xy[None, :, 0], xy[:, None, 1] - xy[None, :, 1])


def grid_shape(n: int) -> tuple[int, int]:
    rows = math.ceil(math.sqrt(n))
    cols = math.ceil(n / rows)
    return rows, cols


def _grid(n: int, side: float) -> np.ndarray:
    rows, cols = grid_shape(n)
    span = max(rows, cols) - 1
    spacing = side / span if span else 0.0
    ids = np.arange(n)
    return np.column_stack(((ids % cols) * spacing, (ids // cols) * spacing))


def _truncated_normal(rng: np.random.Generator, n: int, side: float, sigma: float) -> np.ndarray:
    out = np.empty((0, 2))
    centre = side / 2.0
    while len(out) < n:
        draw = rng.normal(centre, sigma, size=(2 * (n - len(out)) + 8, 2))
        inside = np.all((draw >= 0.0) & (draw <= side), axis=1)
        out = np.vstack((out, draw[inside]))
    return out[:n]


def generate_nodes(
    distribution: str,
    n: int,
    area_side: float,
    seed: int = 0,
    params: Mapping[str, Any] | None = None,
) -> NodeSet:
    """Place ``n`` nodes in ``[0, area_side]^2``.

    ``params`` tunes the non-uniform layouts: ``sigma_fraction`` (normal,
    default 1/6 of the side) and ``exponent`` (skewed, default 2). The grid
    ignores the seed.
    """
    if distribution not in DISTRIBUTIONS:
        raise ValueError(f"unknown distribution {distribution!r}; expected one of {DISTRIBUTIONS}")
    if n < 1:
        raise ValueError("n must be at least 1")
    if not area_side > 0:
        raise ValueError("area_side must be positive")
    params = dict(params or {})
    rng = np.random.default_rng([int(seed), _NODE_STREAM])

    if distribution == "random":
        xy = rng.uniform(0.0, area_side, size=(n, 2))
    elif distribution == "normal":
        sigma = area_side * params.setdefault("sigma_fraction", 1.0 / 6.0)
        xy = _truncated_normal(rng, n, area_side, sigma)
    elif distribution == "skewed":
        exponent = params.setdefault("exponent", 2.0)
        xy = area_side * rng.uniform(0.0, 1.0, size=(n, 2)) ** exponent
    else:
        xy = _grid(n, area_side)
    return NodeSet(xy, float(area_side), distribution, int(seed), params)
