"""Query workload: Zipf item popularity, exponential think times, item sizes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WorkloadConfig:
    n_items: int = 1000
    zipf_theta: float = 0.8
    mean_interarrival: float = 10.0
    s_min: int = 1
    s_max: int = 10
    ttl_min: float = 500.0
    ttl_max: float = 3000.0
    seed: int = 1

    def __post_init__(self):
        if self.n_items < 1:
            raise ValueError("n_items must be >= 1")
        if self.mean_interarrival <= 0:
            raise ValueError("mean_interarrival must be positive")
        if not 1 <= self.s_min <= self.s_max:
            raise ValueError("need 1 <= s_min <= s_max")
        if self.zipf_theta < 0:
            raise ValueError("zipf_theta must be non-negative")
        if not 0 < self.ttl_min <= self.ttl_max:
            raise ValueError("need 0 < ttl_min <= ttl_max")


def zipf_pmf(n_items: int, theta: float) -> np.ndarray:
    """Probability of each rank 1..n (index 0 is rank 1)."""
    w = np.arange(1, n_items + 1, dtype=float) ** -theta
    return w / w.sum()


class ZipfSampler:
    def __init__(self, n_items: int, theta: float):
        self.n_items = n_items
        self.theta = theta
        self.pmf = zipf_pmf(n_items, theta)
        self.cdf = np.cumsum(self.pmf)
        self.cdf[-1] = 1.0

    def sample(self, rng: np.random.Generator) -> int:
        return int(np.searchsorted(self.cdf, rng.random(), side="right")) + 1

    def sample_many(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.searchsorted(self.cdf, rng.random(size), side="right") + 1


def next_interarrival(rng: np.random.Generator, mean: float = 10.0) -> float:
    return float(rng.exponential(mean))


class Database:
    """Item sizes and ttls, fixed for the whole run and shared by all nodes."""

    def __init__(self, cfg: WorkloadConfig, rng: np.random.Generator):
        self.cfg = cfg
        # index 0 unused so data ids index directly
        self.sizes = np.concatenate(([0], rng.integers(cfg.s_min, cfg.s_max + 1, size=cfg.n_items)))
        self.ttls = np.concatenate(([0.0], rng.uniform(cfg.ttl_min, cfg.ttl_max, size=cfg.n_items)))

    def item_size(self, data_id: int) -> int:
        return int(self.sizes[data_id])

    def ttl(self, data_id: int) -> float:
        return float(self.ttls[data_id])

    @property
    def total_size(self) -> int:
        return int(self.sizes.sum())

    def __contains__(self, data_id: int) -> bool:
        return 1 <= data_id <= self.cfg.n_items
