"""Discrete-event engine, metrics, and paired parameter sweeps."""

from __future__ import annotations

import heapq
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .cache import CacheStore, lru_victim, select_victim
from .ccn import CCNProtocol
from .config import SimConfig
from .geometry import Position
from .mobility import Fleet, WaypointState, init_waypoint, next_leg, on_arrival
from .nc import NCProtocol
from .radio import Message, MessageKind, Radio
from .server import Server
from .workload import Database, ZipfSampler, next_interarrival

# Sub-stream tags; every stream is keyed by (seed, tag, node) so paired runs of
# the two schemes see identical mobility and queries.
_DATABASE, _MOBILITY, _QUERIES = 0, 1, 2

CSV_COLUMNS = (
    "scheme", "seed", "density", "cache_pct", "zipf_theta", "requests", "hit_ratio",
    "messages_total", "energy_tx", "energy_rx", "energy_idle", "mean_latency_ms",
)

AXES = {"node_density": "node_density", "cache_size_pct": "cache_pct"}


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class MetricsReport:
    scheme: str
    seed: int
    density: int
    cache_pct: float
    zipf_theta: float
    requests_total: int
    hits_local: int
    hits_remote: int
    server_fetches: int
    in_flight: int
    messages_total: int
    energy_tx: float
    energy_rx: float
    energy_idle: float
    mean_latency: Optional[float]
    stale_replies: int = 0

    @property
    def hit_ratio(self) -> Optional[float]:
        if self.requests_total == 0:
            return None
        return (self.hits_local + self.hits_remote) / self.requests_total

    @property
    def energy_total(self) -> float:
        return self.energy_tx + self.energy_rx + self.energy_idle

    def csv_row(self) -> list[str]:
        hr = self.hit_ratio
        lat = self.mean_latency
        return [
            self.scheme, str(self.seed), str(self.density), repr(float(self.cache_pct)),
            repr(float(self.zipf_theta)), str(self.requests_total),
            "" if hr is None else repr(hr), str(self.messages_total),
            repr(self.energy_tx), repr(self.energy_rx), repr(self.energy_idle),
            "" if lat is None else repr(lat * 1000.0),
        ]


@dataclass
class Request:
    request_id: int
    node: int
    data_id: int
    issued_at: float
    outcome: Optional[str] = None
    resolved_at: Optional[float] = None


class Simulation:
    """One run of one scheme.

    ``static_positions`` pins nodes in place (no mobility events), which
    together with ``queries_enabled = false`` lets callers script exact
    scenarios through :meth:`issue_query`.
    """

    def __init__(self, cfg: SimConfig, *, keep_log: bool = False, trace: bool = False,
                 static_positions: Optional[np.ndarray] = None):
        self.cfg = cfg
        self.trace = trace
        self.now = 0.0
        self._queue: list = []
        self._seq = itertools.count()
        self.n_nodes = cfg.node_density if static_positions is None else len(static_positions)
        n = self.n_nodes
        area = (cfg.area_width, cfg.area_height)
        self._speeds = (cfg.speed_min, cfg.speed_max)
        self._area = area

        self.database = Database(cfg.workload(), self._rng(_DATABASE, 0))
        self.zipf = ZipfSampler(cfg.n_items, cfg.zipf_theta)
        self._mob_rng = [self._rng(_MOBILITY, i) for i in range(n)]
        self._query_rng = [self._rng(_QUERIES, i) for i in range(n)]

        self.mobile = static_positions is None
        if self.mobile:
            states = [init_waypoint(self._mob_rng[i], area, self._speeds) for i in range(n)]
        else:
            pts = [Position(float(x), float(y)) for x, y in np.asarray(static_positions, float)]
            states = [WaypointState(p, p, 0.0, 0.0, 0.0) for p in pts]
        self.fleet = Fleet(states)

        self.radio = Radio(cfg.radio(), n, cfg.transmission_range, self.fleet.positions,
                           self.schedule, self._deliver, keep_log=keep_log)
        self.server = Server(self.database, Position(cfg.server_x, cfg.server_y), cfg.server_delay)
        self.capacity = max(1, int(round(cfg.cache_pct / 100.0 * self.database.total_size)))
        policy = select_victim if cfg.scheme == "ccn" else lru_victim
        self.caches = [CacheStore(self.capacity, policy) for _ in range(n)]
        self.protocol = CCNProtocol(self) if cfg.scheme == "ccn" else NCProtocol(self)

        self.requests: dict[int, Request] = {}
        self._request_ids = itertools.count(1)
        self.counts = {"local": 0, "remote": 0, "server": 0}
        self._latency_sum = 0.0
        self._started = False
        self._finished = False

    def _rng(self, tag: int, node: int) -> np.random.Generator:
        return np.random.default_rng([self.cfg.seed, tag, node])

    # scheduling

    def schedule(self, time: float, fn: Callable, *args):
        if time < self.now:
            raise SimulationError(f"event at {time} scheduled in the past (now={self.now})")
        heapq.heappush(self._queue, (time, next(self._seq), fn, args))

    def position(self, node: int, t: float) -> Position:
        x, y = self.fleet.positions(t)[node]
        return Position(float(x), float(y))

    def _deliver(self, batch, now: float):
        self.protocol.on_deliver(batch, now)

    # mobility

    def _schedule_arrival(self, node: int):
        t = self.fleet.states[node].arrival_time
        if t < self.cfg.sim_time:
            self.schedule(t, self._on_arrival, node)

    def _on_arrival(self, node: int, now: float):
        state = on_arrival(self.fleet.states[node], now, self.cfg.pause_time)
        self.fleet.update(node, state)
        if state.pause_until < self.cfg.sim_time:
            self.schedule(state.pause_until, self._on_pause_end, node)

    def _on_pause_end(self, node: int, now: float):
        state = next_leg(self.fleet.states[node], self._mob_rng[node], now, self._area, self._speeds)
        self.fleet.update(node, state)
        self._schedule_arrival(node)

    # queries

    def _schedule_query(self, node: int, after: float):
        t = after + next_interarrival(self._query_rng[node], self.cfg.mean_query_interval)
        if t < self.cfg.sim_time:
            self.schedule(t, self._on_query_arrival, node)

    def _on_query_arrival(self, node: int, now: float):
        data_id = self.zipf.sample(self._query_rng[node])
        self.issue_query(node, data_id, now)
        self._schedule_query(node, now)

    def issue_query(self, node: int, data_id: int, now: Optional[float] = None) -> int:
        """Start a lookup for ``data_id`` at ``node`` (immediately, or as a scheduled event)."""
        rid = next(self._request_ids)
        if now is None or now == self.now and self._started:
            self._start_request(node, rid, data_id, self.now)
        else:
            self.schedule(now, self._start_request_event, node, rid, data_id)
        return rid

    def _start_request_event(self, node: int, rid: int, data_id: int, now: float):
        self._start_request(node, rid, data_id, now)

    def _start_request(self, node: int, rid: int, data_id: int, now: float):
        self.requests[rid] = Request(rid, node, data_id, now)
        self.protocol.on_query(node, rid, data_id, now)

    def resolve(self, request_id: int, outcome: str, now: float) -> bool:
        req = self.requests[request_id]
        if req.outcome is not None:
            return False
        req.outcome = outcome
        req.resolved_at = now
        self.counts[outcome] += 1
        self._latency_sum += now - req.issued_at
        return True

    # data server

    def fetch_from_server(self, node: int, request_id: int, data_id: int, now: float):
        self.radio.uplink(node, Message(MessageKind.SERVER_REQUEST, node, request_id, data_id), now)
        done = self.server.enqueue(request_id, now + self.cfg.server_link_delay)
        self.schedule(done + self.cfg.server_link_delay, self._on_server_reply,
                      node, request_id, data_id)

    def _on_server_reply(self, node: int, request_id: int, data_id: int, now: float):
        self.server.complete(now)
        self.protocol.on_server_reply(node, request_id, self.server.fetch(data_id), now)

    # main loop

    def start(self):
        if self._started:
            return
        self._started = True
        if self.mobile:
            for node in range(self.n_nodes):
                self._schedule_arrival(node)
        if self.cfg.queries_enabled:
            for node in range(self.n_nodes):
                self._schedule_query(node, 0.0)
        self.protocol.start()

    def run_until(self, until: float):
        self.start()
        queue = self._queue
        while queue and queue[0][0] <= until:
            time, _, fn, args = heapq.heappop(queue)
            self.now = time
            fn(*args, time)
        self.now = max(self.now, until)

    def run(self) -> MetricsReport:
        self.run_until(self.cfg.sim_time)
        return self.finish()

    def finish(self) -> MetricsReport:
        if not self._finished:
            self._finished = True
            self.radio.finalize_idle(self.cfg.sim_time)
        done = sum(self.counts.values())
        tot = self.radio.ledger.totals()
        return MetricsReport(
            scheme=self.cfg.scheme, seed=self.cfg.seed, density=self.n_nodes,
            cache_pct=self.cfg.cache_pct, zipf_theta=self.cfg.zipf_theta,
            requests_total=done, hits_local=self.counts["local"],
            hits_remote=self.counts["remote"], server_fetches=self.counts["server"],
            in_flight=len(self.requests) - done, messages_total=self.radio.messages,
            energy_tx=tot["tx"], energy_rx=tot["rx"], energy_idle=tot["idle"],
            mean_latency=self._latency_sum / done if done else None,
            stale_replies=self.protocol.stale_replies,
        )


def run(config: SimConfig) -> MetricsReport:
    return Simulation(config).run()


def power_savings_ratio(baseline: MetricsReport, ccn: MetricsReport) -> float:
    """Energy saved by ``ccn`` relative to its own consumption."""
    if ccn.energy_total == 0:
        raise ZeroDivisionError("proposed scheme used no energy")
    return (baseline.energy_total - ccn.energy_total) / ccn.energy_total


def _run_one(cfg: SimConfig) -> MetricsReport:
    return run(cfg)


def sweep(base: SimConfig, axis: str, values: Sequence, seeds: Sequence[int] = range(1, 6),
          schemes: Sequence[str] = ("ccn", "nc"), workers: int = 1) -> list[MetricsReport]:
    """Paired runs of every scheme for each (value, seed); returns reports in sweep order."""
    if axis not in AXES:
        raise ValueError(f"axis must be one of {sorted(AXES)}, got {axis!r}")
    field = AXES[axis]
    cast = int if field == "node_density" else float
    configs = [base.replace(**{field: cast(v)}, seed=int(s), scheme=scheme)
               for v in values for s in seeds for scheme in schemes]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_run_one, configs))
    return [_run_one(c) for c in configs]


@dataclass(frozen=True)
class Aggregate:
    scheme: str
    value: float
    n: int
    hit_ratio: float
    hit_ratio_std: float
    messages_total: float
    messages_total_std: float
    energy_total: float
    energy_total_std: float


def _mean_std(xs: Sequence[float]) -> tuple[float, float]:
    a = np.asarray(xs, dtype=float)
    return float(a.mean()), float(a.std(ddof=1)) if len(a) > 1 else math.nan


def aggregate(reports: Sequence[MetricsReport], axis: str) -> list[Aggregate]:
    """Mean and sample standard deviation per (scheme, axis value)."""
    field = "density" if AXES[axis] == "node_density" else "cache_pct"
    groups: dict = {}
    for r in reports:
        groups.setdefault((r.scheme, getattr(r, field)), []).append(r)
    out = []
    for (scheme, value), rs in sorted(groups.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        hr = _mean_std([r.hit_ratio for r in rs if r.hit_ratio is not None] or [math.nan])
        msg = _mean_std([r.messages_total for r in rs])
        en = _mean_std([r.energy_total for r in rs])
        out.append(Aggregate(scheme, value, len(rs), *hr, *msg, *en))
    return out


def paired_savings(reports: Sequence[MetricsReport], axis: str,
                   baseline: str = "nc", proposed: str = "ccn") -> dict:
    """Power savings ratio per axis value, averaged over seeds."""
    field = "density" if AXES[axis] == "node_density" else "cache_pct"
    by_key = {(getattr(r, field), r.seed, r.scheme): r for r in reports}
    ratios: dict = {}
    for (value, seed, scheme), r in by_key.items():
        if scheme != proposed or (value, seed, baseline) not in by_key:
            continue
        ratios.setdefault(value, []).append(power_savings_ratio(by_key[value, seed, baseline], r))
    return {v: float(np.mean(rs)) for v, rs in sorted(ratios.items())}
