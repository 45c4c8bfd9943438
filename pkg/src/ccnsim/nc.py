"""Neighbor Caching baseline: hop-limited flooding with LRU caches.

A local miss is broadcast at full range. Each node handles a request id
once: on a cache hit it answers back along the reverse path, otherwise it
rebroadcasts while hops remain. Without an answer before the deadline the
origin asks the data server. Every fetched item is cached.

All nodes that first hear a flood at the same instant transmit together,
so one hop of a flood is a single :class:`~ccnsim.radio.Layer`. The reverse
path is kept as a parent pointer per node: the first sender (in sender
order) whose transmission reached it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import DataItem
from .radio import Layer, Message, MessageKind


@dataclass(frozen=True, slots=True)
class FloodRequest:
    request_id: int
    data_id: int
    origin: int
    hops_remaining: int


@dataclass
class Flood:
    """Per-request flooding state shared by every node it reaches."""

    request_id: int
    data_id: int
    origin: int
    seen: np.ndarray
    parent: np.ndarray
    waiting_on_server: bool = False
    resolved: bool = False
    reach: list = field(default_factory=list)

    def reverse_path(self, node: int) -> tuple[int, ...]:
        """Nodes from the origin to ``node`` along first-heard links."""
        path = [node]
        while path[-1] != self.origin:
            path.append(int(self.parent[path[-1]]))
        return tuple(reversed(path))


@dataclass(frozen=True, slots=True)
class FloodReply:
    item: DataItem
    path: tuple[int, ...]
    hop: int  # index in ``path`` of the node this copy is addressed to


class NCProtocol:
    name = "nc"

    def __init__(self, sim):
        self.sim = sim
        self.n = sim.n_nodes
        self.hop_limit = sim.cfg.hop_limit
        self.range = sim.cfg.transmission_range
        self.floods: dict[int, Flood] = {}
        self.stale_replies = 0
        self.reach: dict[int, frozenset] = {}

    def start(self):
        pass

    def on_query(self, node: int, request_id: int, data_id: int, now: float):
        if self.sim.caches[node].lookup(data_id, now) is not None:
            self.sim.resolve(request_id, "local", now)
            return
        self.flood_lookup(node, request_id, data_id, now)

    def flood_lookup(self, node: int, request_id: int, data_id: int, now: float) -> Flood:
        seen = np.zeros(self.n, dtype=bool)
        seen[node] = True
        flood = Flood(request_id, data_id, node, seen, np.full(self.n, -1))
        self.floods[request_id] = flood
        if self.hop_limit <= 0:
            self._to_server(flood, now)
            return flood
        req = FloodRequest(request_id, data_id, node, self.hop_limit - 1)
        self.sim.radio.broadcast_many([node], Message(MessageKind.DATA_REQUEST, node, request_id, req),
                                      self.range, now)
        self.sim.schedule(now + self.sim.cfg.flood_timeout, self.on_flood_timeout, request_id)
        return flood

    def on_flood_receive(self, node: int, req: FloodRequest, now: float) -> bool:
        """First copy of ``req`` at ``node``: reply on a hit; True if it should rebroadcast."""
        item = self.sim.caches[node].lookup(req.data_id, now)
        if item is not None:
            path = self.floods[req.request_id].reverse_path(node)
            self._send_reply(req.request_id, FloodReply(item, path, len(path) - 2), node, now)
            return False
        return req.hops_remaining > 0

    def _send_reply(self, request_id: int, reply: FloodReply, sender: int, now: float):
        target = reply.path[reply.hop]
        msg = Message(MessageKind.DATA_REPLY, sender, request_id, reply)
        self.sim.radio.unicast(sender, target, msg, self.range, now)

    def _on_layer(self, layer: Layer, now: float):
        req: FloodRequest = layer.msg.payload
        flood = self.floods.get(req.request_id)
        if flood is None:
            return
        mask = layer.mask
        fresh = np.flatnonzero(mask.any(axis=0) & ~flood.seen)
        if not len(fresh):
            return
        flood.parent[fresh] = layer.senders[np.argmax(mask[:, fresh], axis=0)]
        flood.seen[fresh] = True
        forwarders = [int(r) for r in fresh if self.on_flood_receive(int(r), req, now)]
        if forwarders:
            fwd = FloodRequest(req.request_id, req.data_id, req.origin, req.hops_remaining - 1)
            self.sim.radio.broadcast_many(
                forwarders, Message(MessageKind.DATA_REQUEST, -1, req.request_id, fwd),
                self.range, now)

    def _on_reply(self, node: int, msg: Message, now: float):
        reply: FloodReply = msg.payload
        if reply.hop > 0:
            nxt = FloodReply(reply.item, reply.path, reply.hop - 1)
            self._send_reply(msg.request_id, nxt, node, now)
            return
        flood = self.floods.get(msg.request_id)
        if flood is None or flood.resolved or flood.waiting_on_server:
            self.stale_replies += 1
            return
        flood.resolved = True
        self.sim.resolve(msg.request_id, "remote", now)
        self._cache(node, reply.item, now)

    def _to_server(self, flood: Flood, now: float):
        flood.waiting_on_server = True
        self.sim.fetch_from_server(flood.origin, flood.request_id, flood.data_id, now)

    def on_flood_timeout(self, request_id: int, now: float):
        flood = self.floods.pop(request_id)
        if self.sim.trace:
            self.reach[request_id] = frozenset(int(i) for i in np.flatnonzero(flood.seen)) - {flood.origin}
        if not flood.resolved and not flood.waiting_on_server:
            self.floods[request_id] = flood
            self._to_server(flood, now)

    def on_server_reply(self, node: int, request_id: int, item: DataItem, now: float):
        self.floods.pop(request_id, None)
        self.sim.resolve(request_id, "server", now)
        self._cache(node, item, now)

    def _cache(self, node: int, item: DataItem, now: float):
        store = self.sim.caches[node]
        if item.size <= store.capacity:
            store.insert(item, now)

    def on_deliver(self, batch, now: float):
        if isinstance(batch, Layer):
            self._on_layer(batch, now)
            return
        for msg, receivers in batch:
            if msg.kind is MessageKind.DATA_REPLY:
                for r in receivers:
                    self._on_reply(int(r), msg, now)
