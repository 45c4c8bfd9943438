"""Node identities, positions, and the zone partition of a radio range."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

NodeId = int

# Zone k covers (R / ZONE_DIVISORS[k-1], R / ZONE_DIVISORS[k]]; zone 0 starts at 0.
ZONE_DIVISORS = (6, 4, 2, 1)


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class DataItem:
    data_id: int
    size: int
    ttl: float

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"item size must be >= 1, got {self.size}")


@dataclass(frozen=True)
class Zone:
    index: int
    radius: float


@dataclass(frozen=True)
class NetworkConfig:
    width: float = 1000.0
    height: float = 1000.0
    max_range: float = 500.0
    alpha: float = 2.0
    node_count: int = 40
    seed: int = 1

    def __post_init__(self):
        if self.alpha < 2:
            raise ValueError(f"alpha must be >= 2, got {self.alpha}")
        if self.max_range <= 0:
            raise ValueError("max_range must be positive")
        if self.node_count < 2:
            raise ValueError("node_count must be >= 2")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("area dimensions must be positive")


def zone_radii(max_range: float) -> tuple[float, ...]:
    return tuple(max_range / k for k in ZONE_DIVISORS)


def zones(cfg: NetworkConfig) -> tuple[Zone, ...]:
    return tuple(Zone(i, r) for i, r in enumerate(zone_radii(cfg.max_range)))


def euclidean_distance(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def zone_index(d: float, max_range: float) -> Optional[int]:
    """Index of the zone holding distance ``d``, or None beyond ``max_range``."""
    if d < 0:
        raise ValueError(f"distance must be non-negative, got {d}")
    for i, r in enumerate(zone_radii(max_range)):
        if d <= r:
            return i
    return None


def zone_of(d: float, cfg: NetworkConfig) -> Optional[Zone]:
    i = zone_index(d, cfg.max_range)
    if i is None:
        return None
    return Zone(i, cfg.max_range / ZONE_DIVISORS[i])


def as_coords(positions: Union[np.ndarray, Sequence[Position]]) -> np.ndarray:
    """Coerce positions to an ``(n, 2)`` float array."""
    if isinstance(positions, np.ndarray):
        return positions.reshape(-1, 2).astype(float, copy=False)
    return np.array([(p.x, p.y) for p in positions], dtype=float).reshape(-1, 2)


def neighbors_in_range(
    node: NodeId,
    positions: Union[np.ndarray, Sequence[Position]],
    cfg: NetworkConfig,
) -> list[tuple[NodeId, float]]:
    """Nodes within ``cfg.max_range`` of ``node``, nearest first.

    Membership is decided on squared distances; ties in distance are broken
    by node id.
    """
    coords = as_coords(positions)
    diff = coords - coords[node]
    sq = np.einsum("ij,ij->i", diff, diff)
    mask = sq <= cfg.max_range * cfg.max_range
    mask[node] = False
    ids = np.flatnonzero(mask)
    dist = np.sqrt(sq[ids])
    order = np.lexsort((ids, dist))
    return [(int(ids[k]), float(dist[k])) for k in order]
