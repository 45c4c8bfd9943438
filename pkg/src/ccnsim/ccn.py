"""Zone-escalating cache discovery.

A node that misses locally asks the neighbours in its innermost non-empty
zone first, transmitting at just that zone's radius. If no positive reply
arrives before the zone's timeout, it widens to the next non-empty zone,
and after the full range it asks the data server. Replies from neighbours
are consumed but not cached; server replies are cached when admitted.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .cache import Origin, admit
from .geometry import Position, zone_radii
from .radio import Message, MessageKind

N_ZONES = 4


@dataclass
class NeighborTable:
    owner: int
    entries: list[tuple[int, Position, float]] = field(default_factory=list)
    members: tuple[list[int], ...] = field(default_factory=lambda: tuple([] for _ in range(N_ZONES)))
    last_refresh: float = float("-inf")

    @classmethod
    def build(cls, owner: int, own: Position, reports: Iterable[tuple[int, Position]],
              max_range: float, at: float) -> "NeighborTable":
        """Sort reported neighbours by distance from ``own`` and split them into zones."""
        reports = list(reports)
        table = cls(owner, last_refresh=at)
        if not reports:
            return table
        ids = np.array([n for n, _ in reports])
        xy = np.array([(p.x, p.y) for _, p in reports])
        d = np.hypot(xy[:, 0] - own.x, xy[:, 1] - own.y)
        order = np.lexsort((ids, d))
        order = order[d[order] <= max_range]
        zone = np.searchsorted(np.array(zone_radii(max_range)), d[order], side="left")
        for k, z in zip(order, zone):
            node = int(ids[k])
            table.entries.append((node, reports[k][1], float(d[k])))
            table.members[z].append(node)
        return table

    def next_zone(self, start: int, skip_empty: bool = True) -> Optional[int]:
        for k in range(start, N_ZONES):
            if self.members[k] or not skip_empty:
                return k
        return None

    def zone_of_node(self, node: int) -> Optional[int]:
        for k, nodes in enumerate(self.members):
            if node in nodes:
                return k
        return None


@dataclass
class PendingLookup:
    request_id: int
    data_id: int
    current_zone: int
    deadline: float
    issued_at: float
    zones_visited: list[int] = field(default_factory=list)
    energy: float = 0.0
    at_server: bool = False


@dataclass(frozen=True)
class LookupTrace:
    request_id: int
    zones_visited: tuple[int, ...]
    resolution: str
    latency: float
    energy: float


class CCNProtocol:
    name = "ccn"

    def __init__(self, sim):
        self.sim = sim
        cfg = sim.cfg
        self.radii = zone_radii(cfg.transmission_range)
        self._radii_arr = np.array(self.radii)
        self.n = sim.n_nodes
        self.tables = [NeighborTable(i) for i in range(self.n)]
        self.pending: list[dict[int, PendingLookup]] = [{} for _ in range(self.n)]
        self._staged: list[Optional[list]] = [None] * self.n
        self._refresh_ids = itertools.count(1)
        self.stale_replies = 0
        self.traces: list[LookupTrace] = []

    def timeout(self, zone: int) -> float:
        return self.sim.cfg.t1 * (zone + 1)

    # neighbour discovery

    def start(self):
        if self.sim.cfg.refresh_period > 0:
            for node in range(self.n):
                self.sim.schedule(0.0, self.refresh_neighbors, node)

    def refresh_neighbors(self, node: int, now: float):
        sim = self.sim
        pos = sim.position(node, now)
        msg = Message(MessageKind.NEIGHBOR_REQUEST, node, next(self._refresh_ids), pos)
        self._staged[node] = []
        sim.radio.broadcast(node, msg, sim.cfg.transmission_range, now)
        sim.schedule(now + 3 * sim.cfg.prop_delay, self._commit_table, node)
        nxt = now + sim.cfg.refresh_period
        if nxt < sim.cfg.sim_time:
            sim.schedule(nxt, self.refresh_neighbors, node)

    def _commit_table(self, node: int, now: float):
        reports = self._staged[node] or []
        self._staged[node] = None
        self.tables[node] = NeighborTable.build(
            node, self.sim.position(node, now), reports, self.sim.cfg.transmission_range, now)

    def _on_neighbor_request(self, receivers, msg: Message, now: float):
        """Every receiver answers with its location, at the smallest zone radius reaching the asker."""
        receivers = np.asarray(receivers, dtype=int)
        pos = self.sim.fleet.positions(now)[receivers]
        src = msg.payload
        d = np.hypot(pos[:, 0] - src.x, pos[:, 1] - src.y)
        zone = np.minimum(np.searchsorted(self._radii_arr, d, side="left"), N_ZONES - 1)
        replies = [Message(MessageKind.NEIGHBOR_REPLY, int(r), msg.request_id,
                           Position(float(x), float(y)))
                   for r, (x, y) in zip(receivers, pos)]
        self.sim.radio.unicast_many(receivers, msg.source, replies, self._radii_arr[zone], now)

    def _on_neighbor_reply(self, node: int, msg: Message, now: float):
        staged = self._staged[node]
        if staged is not None:
            staged.append((msg.source, msg.payload))

    # data discovery

    def on_query(self, node: int, request_id: int, data_id: int, now: float):
        if self.sim.caches[node].lookup(data_id, now) is not None:
            self.sim.resolve(request_id, "local", now)
            if self.sim.trace:
                self.traces.append(LookupTrace(request_id, (), "local", 0.0, 0.0))
            return
        self.begin_lookup(node, request_id, data_id, now)

    def begin_lookup(self, node: int, request_id: int, data_id: int, now: float):
        lookup = PendingLookup(request_id, data_id, -1, now, now)
        self.pending[node][request_id] = lookup
        zone = self.tables[node].next_zone(0, self.sim.cfg.skip_empty_zones)
        if zone is None:
            self._to_server(node, lookup, now)
        else:
            self._search_zone(node, lookup, zone, now)
        return lookup

    def _search_zone(self, node: int, lookup: PendingLookup, zone: int, now: float):
        radius = self.radii[zone]
        msg = Message(MessageKind.DATA_REQUEST, node, lookup.request_id,
                      (lookup.data_id, zone, radius))
        self.sim.radio.broadcast(node, msg, radius, now)
        lookup.current_zone = zone
        lookup.deadline = now + self.timeout(zone)
        lookup.zones_visited.append(zone)
        lookup.energy += radius ** self.sim.cfg.alpha + self.sim.cfg.power_constant
        self.sim.schedule(lookup.deadline, self.on_timeout, node, lookup.request_id, zone)

    def _to_server(self, node: int, lookup: PendingLookup, now: float):
        lookup.at_server = True
        self.sim.fetch_from_server(node, lookup.request_id, lookup.data_id, now)

    def on_timeout(self, node: int, request_id: int, zone: int, now: float):
        lookup = self.pending[node].get(request_id)
        if lookup is None or lookup.at_server or lookup.current_zone != zone:
            return
        nxt = self.tables[node].next_zone(zone + 1, self.sim.cfg.skip_empty_zones)
        if nxt is None:
            self._to_server(node, lookup, now)
        else:
            self._search_zone(node, lookup, nxt, now)

    def on_data_request(self, receiver: int, msg: Message, now: float):
        data_id, _, radius = msg.payload
        item = self.sim.caches[receiver].lookup(data_id, now)
        if item is None:
            return None
        reply = Message(MessageKind.DATA_REPLY, receiver, msg.request_id, item)
        self.sim.radio.unicast(receiver, msg.source, reply, radius, now)
        return reply

    def on_data_reply(self, node: int, msg: Message, now: float):
        lookup = self.pending[node].get(msg.request_id)
        if lookup is None or lookup.at_server:
            self.stale_replies += 1
            return
        del self.pending[node][msg.request_id]
        self.sim.resolve(msg.request_id, "remote", now)
        store = self.sim.caches[node]
        if admit(msg.payload, Origin.NEIGHBOR, store):
            store.insert(msg.payload, now)
        self._trace(lookup, "remote", now)

    def on_server_reply(self, node: int, request_id: int, item, now: float):
        lookup = self.pending[node].pop(request_id, None)
        self.sim.resolve(request_id, "server", now)
        store = self.sim.caches[node]
        if admit(item, Origin.SERVER, store):
            store.insert(item, now)
        if lookup is not None:
            self._trace(lookup, "server", now)

    def _trace(self, lookup: PendingLookup, resolution: str, now: float):
        if self.sim.trace:
            self.traces.append(LookupTrace(lookup.request_id, tuple(lookup.zones_visited),
                                           resolution, now - lookup.issued_at, lookup.energy))

    def on_deliver(self, batch, now: float):
        for msg, receivers in batch:
            kind = msg.kind
            if kind is MessageKind.DATA_REQUEST:
                for r in receivers:
                    self.on_data_request(int(r), msg, now)
            elif kind is MessageKind.DATA_REPLY:
                for r in receivers:
                    self.on_data_reply(int(r), msg, now)
            elif kind is MessageKind.NEIGHBOR_REQUEST:
                self._on_neighbor_request(receivers, msg, now)
            elif kind is MessageKind.NEIGHBOR_REPLY:
                for r in receivers:
                    self._on_neighbor_reply(int(r), msg, now)


def write_traces(path, traces: Iterable[LookupTrace]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["request_id", "zones_visited", "resolution", "latency", "energy"])
        for t in traces:
            w.writerow([t.request_id, " ".join(map(str, t.zones_visited)), t.resolution,
                        repr(t.latency), repr(t.energy)])
