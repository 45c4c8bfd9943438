import random

import pytest
from hypothesis import given, settings, strategies as st

from ccnsim.cache import (
    CacheEntry, CacheStore, EmptyCacheError, Origin, admit, lru_victim, select_victim,
)
from ccnsim.geometry import DataItem
from oracles import random_store_entries, victim_by_prose


def entry(data_id, last, prev=None, refs=None, expiry=1000.0, size=1):
    if refs is None:
        refs = 1 if prev is None else 2
    return CacheEntry(data_id, size, expiry, last, prev, refs)


@pytest.mark.parametrize("size, origin, expected", [
    (60, Origin.SERVER, False),
    (40, Origin.SERVER, True),
    (50, Origin.SERVER, True),
    (5, Origin.NEIGHBOR, False),
    (5, Origin.LOCAL, False),
])
def test_admission(size, origin, expected):
    assert admit(DataItem(1, size, 100.0), origin, CacheStore(100)) is expected


def test_record_access_shifts_history():
    s = CacheStore(100)
    s.insert(DataItem(1, 3, 500.0), now=10.0)
    assert s.entries[1].ref_count == 1 and s.entries[1].prev_access is None
    assert s.record_access(1, 25.0)
    e = s.entries[1]
    assert (e.prev_access, e.last_access, e.inter_arrival, e.ref_count) == (10.0, 25.0, 15.0, 2)
    s.record_access(1, 25.0)
    assert s.entries[1].inter_arrival == 0.0
    assert not s.record_access(99, 30.0)


def test_victim_prefers_once_referenced():
    entries = [entry(1, 5.0), entry(2, 200.0, prev=100.0, refs=3)]
    assert select_victim(entries) == 1


def test_victim_largest_gap():
    entries = [entry(1, 17.0, prev=10.0), entry(2, 13.0, prev=10.0)]
    assert select_victim(entries) == 1
    assert select_victim(entries) == victim_by_prose(entries)


def test_victim_gap_tie_broken_by_expiry():
    entries = [entry(1, 20.0, prev=10.0, expiry=90.0), entry(2, 30.0, prev=20.0, expiry=50.0)]
    assert select_victim(entries) == 2
    assert select_victim(entries) == victim_by_prose(entries)


def test_victim_zero_gaps_use_oldest_reference():
    entries = [entry(1, 20.0, prev=20.0), entry(2, 10.0, prev=10.0)]
    assert select_victim(entries) == 2


def test_victim_once_ties_on_expiry_then_id():
    entries = [entry(3, 5.0, expiry=9.0), entry(1, 5.0, expiry=9.0), entry(2, 5.0, expiry=20.0)]
    assert select_victim(entries) == 1


def test_empty_store_victim_errors():
    with pytest.raises(EmptyCacheError):
        select_victim([])
    with pytest.raises(EmptyCacheError):
        lru_victim([])


def test_lru_victim():
    assert lru_victim([entry(1, 5.0), entry(2, 9.0)]) == 1
    assert lru_victim([entry(4, 1.0)]) == 4
    assert lru_victim([entry(7, 3.0, prev=1.0), entry(2, 3.0)]) == 2


def test_victim_matches_prose_oracle_on_random_stores():
    r = random.Random(2024)
    for _ in range(2000):
        entries = random_store_entries(r, r.randint(1, 12))
        assert select_victim(entries) == victim_by_prose(entries)


def test_insert_and_eviction_order():
    s = CacheStore(10)
    assert s.insert(DataItem(1, 10, 100.0), 0.0) == []
    s2 = CacheStore(10)
    for i, t in [(1, 0.0), (2, 1.0), (3, 2.0)]:
        s2.insert(DataItem(i, 3, 100.0), t)
    s2.record_access(1, 5.0)
    evicted = s2.insert(DataItem(4, 5, 100.0), 6.0)
    assert evicted == [2, 3]
    assert s2.used <= s2.capacity
    assert set(s2.entries) == {1, 4}


def test_eviction_sequence_matches_oracle_replay():
    r = random.Random(7)
    for _ in range(300):
        s = CacheStore(30)
        shadow = {}
        now = 0.0
        for _ in range(40):
            now += r.choice([0.0, 1.0, 2.0])
            did = r.randint(1, 25)
            if did in s and r.random() < 0.5:
                s.record_access(did, now)
                e = shadow[did]
                shadow[did] = CacheEntry(did, e.size, e.expiry, now, e.last_access, e.ref_count + 1)
                continue
            if did in s:
                continue
            item = DataItem(did, r.randint(1, 10), float(r.randint(1, 40)))
            expected = []
            free = 30 - sum(e.size for e in shadow.values())
            while free < item.size:
                v = victim_by_prose(list(shadow.values()))
                expected.append(v)
                free += shadow.pop(v).size
            assert s.insert(item, now) == expected
            shadow[did] = CacheEntry(did, item.size, now + item.ttl, now)


def test_reinsert_refreshes_in_place():
    s = CacheStore(20)
    s.insert(DataItem(1, 4, 10.0), 0.0)
    s.insert(DataItem(1, 4, 10.0), 5.0)
    assert len(s) == 1 and s.used == 4
    assert s.entries[1].expiry == 15.0


def test_item_larger_than_capacity_rejected():
    with pytest.raises(ValueError):
        CacheStore(5).insert(DataItem(1, 6, 1.0), 0.0)


def test_lookup_ttl_semantics():
    s = CacheStore(20)
    s.insert(DataItem(1, 4, 10.0), 0.0)
    hit = s.lookup(1, 5.0)
    assert hit == DataItem(1, 4, 5.0)
    assert s.entries[1].ref_count == 2
    assert s.lookup(1, 10.0) is None
    assert 1 not in s and s.used == 0
    assert s.lookup(2, 0.0) is None


ops = st.lists(st.tuples(st.sampled_from(["insert", "lookup"]), st.integers(1, 30),
                         st.integers(1, 10), st.floats(0.5, 50)), max_size=80)


@settings(max_examples=200)
@given(ops, st.integers(10, 60), st.sampled_from(["ccn", "nc"]))
def test_capacity_and_history_invariants(seq, capacity, kind):
    s = CacheStore(capacity, select_victim if kind == "ccn" else lru_victim)
    now = 0.0
    for op, did, size, dt in seq:
        now += dt
        if op == "insert":
            item = DataItem(did, size, 20.0)
            if kind == "ccn" and not admit(item, Origin.SERVER, s):
                continue
            s.insert(item, now)
        else:
            before = s.entries.get(did)
            refs = before.ref_count if before else None
            if s.lookup(did, now) is not None:
                assert s.entries[did].ref_count == refs + 1
        assert s.used == sum(e.size for e in s.entries.values()) <= capacity
        for e in s.entries.values():
            assert (e.prev_access is not None) == (e.ref_count >= 2)
            if e.prev_access is not None:
                assert e.prev_access <= e.last_access
            if kind == "ccn":
                assert e.size <= s.threshold
