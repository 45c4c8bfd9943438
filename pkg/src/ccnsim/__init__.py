"""Zone-based cooperative cache discovery for mobile ad hoc networks.

A deterministic discrete-event simulator comparing zone-escalating,
power-controlled cache discovery (``ccn``) against hop-limited flooding
with LRU caches (``nc``).
"""

from .cache import CacheEntry, CacheStore, Origin, admit, lru_victim, select_victim
from .config import ConfigError, SimConfig, load_config
from .engine import MetricsReport, power_savings_ratio, run, sweep
from .geometry import (
    DataItem,
    NetworkConfig,
    Position,
    Zone,
    euclidean_distance,
    neighbors_in_range,
    zone_of,
    zones,
)

__all__ = [
    "CacheEntry",
    "CacheStore",
    "ConfigError",
    "DataItem",
    "MetricsReport",
    "NetworkConfig",
    "Origin",
    "Position",
    "SimConfig",
    "Zone",
    "admit",
    "euclidean_distance",
    "load_config",
    "lru_victim",
    "neighbors_in_range",
    "power_savings_ratio",
    "run",
    "select_victim",
    "sweep",
    "zone_of",
    "zones",
]

__version__ = "0.1.0"
