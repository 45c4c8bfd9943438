"""Range-controlled radio and per-node energy accounting.

Transmitting at range ``r`` costs ``r ** alpha + c`` energy units, where
units are meters**alpha. Receiving costs a flat ``rx_cost`` per message
and an idle radio drains ``idle_power`` per second. There is no MAC layer:
every node inside the chosen range hears every transmission.
"""

from __future__ import annotations

import csv
import enum
from collections import Counter
from dataclasses import dataclass
from typing import Any, Callable, NamedTuple, Optional, Sequence

import numpy as np


class MessageKind(enum.Enum):
    NEIGHBOR_REQUEST = "NeighborRequest"
    NEIGHBOR_REPLY = "NeighborReply"
    DATA_REQUEST = "DataRequest"
    DATA_REPLY = "DataReply"
    SERVER_REQUEST = "ServerRequest"
    SERVER_REPLY = "ServerReply"


@dataclass(slots=True)
class Message:
    kind: MessageKind
    source: int
    request_id: int
    payload: Any = None


@dataclass(frozen=True)
class RadioConfig:
    alpha: float = 2.0
    rx_cost: float = 1.0
    idle_power: float = 0.01
    prop_delay: float = 0.002
    c: float = 0.0

    def __post_init__(self):
        for name in ("rx_cost", "idle_power", "prop_delay", "c"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.alpha < 2:
            raise ValueError("alpha must be >= 2")


def tx_energy(range_: float, alpha: float, c: float = 0.0) -> float:
    if range_ < 0:
        raise ValueError("range must be non-negative")
    return range_ ** alpha + c


class EnergyLedger:
    """Cumulative transmit, receive and idle energy for each node."""

    def __init__(self, n_nodes: int):
        self.tx = np.zeros(n_nodes)
        self.rx = np.zeros(n_nodes)
        self.idle = np.zeros(n_nodes)

    def charge_tx(self, node: int, energy: float):
        self.tx[node] += energy

    def charge_rx(self, nodes, energy: float):
        # np.add.at: receivers may repeat within one batch
        np.add.at(self.rx, nodes, energy)

    def accrue_idle(self, node: int, elapsed: float, idle_power: float):
        if elapsed < 0:
            raise ValueError("elapsed time must be non-negative")
        self.idle[node] += idle_power * elapsed

    def totals(self) -> dict[str, float]:
        return {"tx": float(self.tx.sum()), "rx": float(self.rx.sum()),
                "idle": float(self.idle.sum())}


class Transmission(NamedTuple):
    time: float
    sender: int
    kind: str
    range: float
    deliveries: int


Batch = list[tuple[Message, np.ndarray]]


class Layer(NamedTuple):
    """Simultaneous transmissions of one message; ``mask[k, j]`` is True when
    ``senders[k]`` reached node ``j``."""

    msg: Message
    senders: np.ndarray
    mask: np.ndarray


class Radio:
    """Delivers messages to nodes in range after one propagation delay.

    ``positions(t)`` returns an ``(n, 2)`` array of node coordinates,
    ``schedule(time, fn, *args)`` queues a callback, and
    ``deliver(batch, now)`` receives either a list of ``(message, receivers)``
    pairs or a :class:`Layer`.
    """

    def __init__(
        self,
        cfg: RadioConfig,
        n_nodes: int,
        max_range: float,
        positions: Callable[[float], np.ndarray],
        schedule: Callable[..., Any],
        deliver: Callable[[Batch, float], Any],
        keep_log: bool = False,
    ):
        self.cfg = cfg
        self.max_range = max_range
        self.positions = positions
        self.schedule = schedule
        self.deliver = deliver
        self.ledger = EnergyLedger(n_nodes)
        self.counts: Counter = Counter()
        self.log: Optional[list[Transmission]] = [] if keep_log else None

    @property
    def messages(self) -> int:
        return sum(self.counts.values())

    def _charge(self, sender: int, kind: MessageKind, range_: float, at: float, n_rx: int):
        if range_ > self.max_range * (1 + 1e-12):
            raise ValueError(f"range {range_} exceeds maximum {self.max_range}")
        self.ledger.tx[sender] += range_ ** self.cfg.alpha + self.cfg.c
        self.counts[kind] += 1
        if self.log is not None:
            self.log.append(Transmission(at, sender, kind.value, range_, n_rx))

    def in_range(self, sender: int, range_: float, at: float) -> np.ndarray:
        pos = self.positions(at)
        diff = pos - pos[sender]
        sq = np.einsum("ij,ij->i", diff, diff)
        mask = sq <= range_ * range_
        mask[sender] = False
        return np.flatnonzero(mask)

    def broadcast(self, sender: int, msg: Message, range_: float, at: float) -> np.ndarray:
        receivers = self.in_range(sender, range_, at)
        self._charge(sender, msg.kind, range_, at, len(receivers))
        if len(receivers):
            self.ledger.rx[receivers] += self.cfg.rx_cost
            self.schedule(at + self.cfg.prop_delay, self.deliver, [(msg, receivers)])
        return receivers

    def broadcast_many(self, senders: Sequence[int], msg: Message, range_: float,
                       at: float) -> np.ndarray:
        """Several nodes transmit ``msg`` simultaneously at one range.

        Delivered as a single :class:`Layer`; returns the ``(k, n)`` reach mask.
        """
        idx = np.asarray(senders, dtype=int)
        pos = self.positions(at)
        diff = pos[None, :, :] - pos[idx][:, None, :]
        mask = np.einsum("kij,kij->ki", diff, diff) <= range_ * range_
        mask[np.arange(len(idx)), idx] = False
        if range_ > self.max_range * (1 + 1e-12):
            raise ValueError(f"range {range_} exceeds maximum {self.max_range}")
        cost = range_ ** self.cfg.alpha + self.cfg.c
        self.ledger.tx[idx] += cost
        self.counts[msg.kind] += len(idx)
        per_sender = mask.sum(axis=1)
        if self.log is not None:
            for s, k in zip(idx, per_sender):
                self.log.append(Transmission(at, int(s), msg.kind.value, range_, int(k)))
        self.ledger.rx += self.cfg.rx_cost * mask.sum(axis=0)
        if per_sender.any():
            self.schedule(at + self.cfg.prop_delay, self.deliver, Layer(msg, idx, mask))
        return mask

    def unicast(self, sender: int, target: int, msg: Message, range_: float, at: float) -> bool:
        """Targeted send; only ``target`` pays receive cost, and only if in range."""
        pos = self.positions(at)
        dx, dy = pos[target] - pos[sender]
        ok = dx * dx + dy * dy <= range_ * range_
        self._charge(sender, msg.kind, range_, at, int(ok))
        if ok:
            self.ledger.rx[target] += self.cfg.rx_cost
            self.schedule(at + self.cfg.prop_delay, self.deliver,
                          [(msg, np.array([target]))])
        return bool(ok)

    def unicast_many(self, senders: Sequence[int], target: int, msgs: Sequence[Message],
                     ranges: Sequence[float], at: float) -> np.ndarray:
        """Simultaneous targeted sends to one node, delivered as one batch in sender order."""
        idx = np.asarray(senders, dtype=int)
        rng = np.asarray(ranges, dtype=float)
        if len(idx) == 0:
            return np.zeros(0, dtype=bool)
        if rng.max() > self.max_range * (1 + 1e-12):
            raise ValueError(f"range {rng.max()} exceeds maximum {self.max_range}")
        pos = self.positions(at)
        diff = pos[idx] - pos[target]
        ok = np.einsum("ij,ij->i", diff, diff) <= rng * rng
        self.ledger.tx[idx] += rng ** self.cfg.alpha + self.cfg.c
        for m in msgs:
            self.counts[m.kind] += 1
        if self.log is not None:
            for s, m, r, hit in zip(idx, msgs, rng, ok):
                self.log.append(Transmission(at, int(s), m.kind.value, float(r), int(hit)))
        n_ok = int(ok.sum())
        if n_ok:
            self.ledger.rx[target] += self.cfg.rx_cost * n_ok
            tgt = (target,)
            batch = [(m, tgt) for m, hit in zip(msgs, ok) if hit]
            self.schedule(at + self.cfg.prop_delay, self.deliver, batch)
        return ok

    def uplink(self, sender: int, msg: Message, at: float):
        """Full-range transmission towards the data server (no peer receives it)."""
        self._charge(sender, msg.kind, self.max_range, at, 0)

    def finalize_idle(self, until: float):
        for node in range(len(self.ledger.idle)):
            self.ledger.accrue_idle(node, until, self.cfg.idle_power)


def resum_log(log: Sequence[Transmission], cfg: RadioConfig) -> dict[str, float]:
    """Energy totals recomputed from a transmission log."""
    tx = sum(tx_energy(t.range, cfg.alpha, cfg.c) for t in log)
    rx = cfg.rx_cost * sum(t.deliveries for t in log)
    return {"tx": tx, "rx": rx}


def write_transmission_log(path, log: Sequence[Transmission]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(Transmission._fields)
        for rec in log:
            w.writerow([repr(rec.time), rec.sender, rec.kind, repr(rec.range), rec.deliveries])
