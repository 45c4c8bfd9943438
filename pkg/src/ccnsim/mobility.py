"""Random waypoint movement.

Each node travels in a straight line at constant speed to a uniformly
drawn destination, pauses there, then starts a new leg. Legs are
scheduled as arrival and pause-end events; positions in between are
interpolated on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import Position


@dataclass(frozen=True)
class WaypointState:
    origin: Position
    destination: Position
    speed: float
    depart_time: float
    pause_until: float

    @property
    def leg_length(self) -> float:
        return math.hypot(self.destination.x - self.origin.x,
                          self.destination.y - self.origin.y)

    @property
    def arrival_time(self) -> float:
        if self.speed <= 0 or self.leg_length == 0:
            return self.depart_time
        return self.depart_time + self.leg_length / self.speed


def _uniform_point(rng: np.random.Generator, area: tuple[float, float]) -> Position:
    x, y = rng.uniform(0.0, 1.0, size=2)
    return Position(float(x * area[0]), float(y * area[1]))


def init_waypoint(
    rng: np.random.Generator,
    area: tuple[float, float],
    speed_range: tuple[float, float] = (1.0, 10.0),
) -> WaypointState:
    """Random initial placement with the first leg starting at t=0."""
    if area[0] <= 0 or area[1] <= 0:
        raise ValueError("area dimensions must be positive")
    origin = _uniform_point(rng, area)
    destination = _uniform_point(rng, area)
    speed = float(rng.uniform(*speed_range))
    return WaypointState(origin, destination, speed, 0.0, 0.0)


def position_at(state: WaypointState, t: float) -> Position:
    if t < state.depart_time:
        raise ValueError(f"t={t} precedes departure at {state.depart_time}")
    length = state.leg_length
    if length == 0 or t >= state.arrival_time:
        return state.destination
    frac = state.speed * (t - state.depart_time) / length
    o, d = state.origin, state.destination
    return Position(o.x + frac * (d.x - o.x), o.y + frac * (d.y - o.y))


def on_arrival(state: WaypointState, t: float, pause: float = 200.0) -> WaypointState:
    """Hold at the reached destination until ``t + pause``."""
    return WaypointState(state.destination, state.destination, state.speed, t, t + pause)


def next_leg(
    state: WaypointState,
    rng: np.random.Generator,
    t: float,
    area: tuple[float, float],
    speed_range: tuple[float, float] = (1.0, 10.0),
) -> WaypointState:
    """Draw a fresh destination and speed once the pause at ``t`` ends."""
    destination = _uniform_point(rng, area)
    speed = float(rng.uniform(*speed_range))
    return replace(state, origin=state.destination, destination=destination,
                   speed=speed, depart_time=t, pause_until=t)


class Fleet:
    """Waypoint states of every node, with vectorised position queries."""

    def __init__(self, states: list[WaypointState]):
        self.states = list(states)
        n = len(self.states)
        self._origin = np.zeros((n, 2))
        self._dest = np.zeros((n, 2))
        self._dir = np.zeros((n, 2))
        self._speed = np.zeros(n)
        self._depart = np.zeros(n)
        self._length = np.zeros(n)
        for i, s in enumerate(self.states):
            self._load(i, s)
        self._cache_t = None
        self._cache = None

    def __len__(self):
        return len(self.states)

    def _load(self, i: int, s: WaypointState):
        o, d = s.origin, s.destination
        length = s.leg_length
        self._origin[i] = (o.x, o.y)
        self._dest[i] = (d.x, d.y)
        self._length[i] = length
        self._speed[i] = s.speed
        self._depart[i] = s.depart_time
        if length > 0:
            self._dir[i] = ((d.x - o.x) / length, (d.y - o.y) / length)
        else:
            self._dir[i] = (0.0, 0.0)

    def update(self, i: int, state: WaypointState):
        self.states[i] = state
        self._load(i, state)
        self._cache_t = None

    def positions(self, t: float) -> np.ndarray:
        """``(n, 2)`` array of positions at time ``t``; do not mutate."""
        if t == self._cache_t:
            return self._cache
        travelled = np.minimum(self._speed * np.maximum(t - self._depart, 0.0), self._length)
        pos = self._origin + self._dir * travelled[:, None]
        arrived = travelled >= self._length
        pos[arrived] = self._dest[arrived]
        self._cache_t, self._cache = t, pos
        return pos

    def position(self, i: int, t: float) -> Position:
        return position_at(self.states[i], t)
