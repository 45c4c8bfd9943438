"""Per-node cache with size-threshold admission and reference-aware eviction.

Admission: only items fetched from the data server are cached, and only if
they are no larger than half the cache. Eviction prefers items referenced
once (least recently used first); among items referenced at least twice it
evicts the one with the largest gap between its two latest references.
Remaining ties go to the earliest expiry, then the smallest data id.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .geometry import DataItem


class Origin(enum.Enum):
    SERVER = "server"
    NEIGHBOR = "neighbor"
    LOCAL = "local"


class EmptyCacheError(LookupError):
    """Raised when a victim is requested from an empty store."""


@dataclass(slots=True)
class CacheEntry:
    data_id: int
    size: int
    expiry: float
    last_access: float
    prev_access: Optional[float] = None
    ref_count: int = 1

    @property
    def inter_arrival(self) -> Optional[float]:
        if self.prev_access is None:
            return None
        return self.last_access - self.prev_access


def select_victim(entries: Iterable[CacheEntry], now: float = 0.0) -> int:
    entries = list(entries)
    if not entries:
        raise EmptyCacheError("nothing to evict")
    once = [e for e in entries if e.ref_count == 1]
    if once:
        return min(once, key=lambda e: (e.last_access, e.expiry, e.data_id)).data_id
    widest = max(e.inter_arrival for e in entries)
    if widest > 0:
        pool = [e for e in entries if e.inter_arrival == widest]
        return min(pool, key=lambda e: (e.expiry, e.data_id)).data_id
    return min(entries, key=lambda e: (e.last_access, e.expiry, e.data_id)).data_id


def lru_victim(entries: Iterable[CacheEntry], now: float = 0.0) -> int:
    entries = list(entries)
    if not entries:
        raise EmptyCacheError("nothing to evict")
    return min(entries, key=lambda e: (e.last_access, e.data_id)).data_id


VictimPolicy = Callable[[Iterable[CacheEntry], float], int]


class CacheStore:
    def __init__(self, capacity: int, policy: VictimPolicy = select_victim):
        if capacity < 1:
            raise ValueError("capacity must be at least one cache unit")
        self.capacity = capacity
        self.policy = policy
        self.entries: dict[int, CacheEntry] = {}
        self.used = 0
        self.evictions = 0

    @property
    def threshold(self) -> float:
        return 0.5 * self.capacity

    @property
    def free(self) -> int:
        return self.capacity - self.used

    def __contains__(self, data_id: int) -> bool:
        return data_id in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def record_access(self, data_id: int, now: float) -> bool:
        """Shift the access history of ``data_id``; False if it is not cached."""
        e = self.entries.get(data_id)
        if e is None:
            return False
        e.prev_access = e.last_access
        e.last_access = now
        e.ref_count += 1
        return True

    def select_victim(self, now: float) -> int:
        return self.policy(self.entries.values(), now)

    def remove(self, data_id: int):
        e = self.entries.pop(data_id)
        self.used -= e.size

    def lookup(self, data_id: int, now: float) -> Optional[DataItem]:
        """Return a fresh copy of the item (remaining ttl) or None; drops expired entries."""
        e = self.entries.get(data_id)
        if e is None:
            return None
        if e.expiry <= now:
            self.remove(data_id)
            return None
        self.record_access(data_id, now)
        return DataItem(data_id, e.size, e.expiry - now)

    def peek(self, data_id: int, now: float) -> bool:
        e = self.entries.get(data_id)
        return e is not None and e.expiry > now

    def insert(self, item: DataItem, now: float) -> list[int]:
        """Store ``item``, evicting as needed. Returns the evicted data ids."""
        if item.size > self.capacity:
            raise ValueError(f"item of size {item.size} exceeds capacity {self.capacity}")
        old = self.entries.get(item.data_id)
        if old is not None:
            self.used += item.size - old.size
            old.size = item.size
            old.expiry = now + item.ttl
            evicted = self._make_room(0, now, keep=item.data_id)
            return evicted
        evicted = self._make_room(item.size, now)
        self.entries[item.data_id] = CacheEntry(item.data_id, item.size, now + item.ttl, now)
        self.used += item.size
        return evicted

    def _make_room(self, size: int, now: float, keep: Optional[int] = None) -> list[int]:
        evicted = []
        while self.capacity - self.used < size or self.used > self.capacity:
            pool = (e for e in self.entries.values() if e.data_id != keep)
            victim = self.policy(pool, now)
            self.remove(victim)
            evicted.append(victim)
        self.evictions += len(evicted)
        return evicted


def admit(item: DataItem, origin: Origin, store: CacheStore) -> bool:
    """Cache only server-fetched items no larger than half the store."""
    return origin is Origin.SERVER and item.size <= store.threshold
