"""
Inter-arrival replacement against plain LRU
===========================================

The zone scheme's caches evict by reference history. Items seen only once
leave first (least recent first). Among repeat items, the one with the
widest gap between its last two references leaves. Plain LRU only looks at
the last reference. Both stores below see the same Zipf access stream, and
the replacement cost is counted as misses.
"""

# %%
import numpy as np

from ccnsim.cache import CacheEntry, CacheStore, lru_victim, select_victim
from ccnsim.geometry import DataItem
from ccnsim.workload import ZipfSampler

# A small hand-built store first: item 3 was seen once, so it goes even
# though item 1 was touched earlier.
entries = [
    CacheEntry(1, 2, 900.0, last_access=4.0, prev_access=3.0, ref_count=2),
    CacheEntry(2, 2, 900.0, last_access=9.0, prev_access=1.0, ref_count=2),
    CacheEntry(3, 2, 900.0, last_access=6.0, prev_access=None, ref_count=1),
]
print("history policy evicts", select_victim(entries), "| lru evicts", lru_victim(entries))
print("without item 3:", select_victim(entries[:2]), "(widest gap: 8 s)")

# %%
# Replay one access stream through both policies.

rng = np.random.default_rng(0)
ids = ZipfSampler(1000, 0.8).sample_many(rng, 20_000)
times = np.cumsum(rng.exponential(10.0, len(ids)))


def replay(policy, capacity):
    store = CacheStore(capacity, policy)
    hits = 0
    for data_id, t in zip(ids, times):
        if store.lookup(int(data_id), float(t)) is not None:
            hits += 1
        else:
            store.insert(DataItem(int(data_id), 1, 1e9), float(t))
    return hits / len(ids), store.evictions


for capacity in (25, 50, 100, 200):
    (h1, e1), (h2, e2) = replay(select_victim, capacity), replay(lru_victim, capacity)
    print(f"capacity {capacity:>3}: history {h1:.3f} ({e1} evictions) | lru {h2:.3f} ({e2} evictions)")
