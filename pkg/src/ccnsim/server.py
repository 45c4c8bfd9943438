"""Fixed data center serving every item first-come first-served."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .geometry import DataItem, Position
from .workload import Database


@dataclass
class Server:
    database: Database
    position: Position = Position(500.0, 500.0)
    service_delay: float = 0.008
    busy_until: float = 0.0
    served: int = 0
    queue: deque = field(default_factory=deque)

    def enqueue(self, request, at: float) -> float:
        """Queue ``request`` arriving at ``at``; returns its completion time."""
        if self.queue and self.queue[0][0] <= at:
            self._drain(at)
        done = max(at, self.busy_until) + self.service_delay
        self.busy_until = done
        self.queue.append((done, request))
        return done

    def _drain(self, now: float):
        while self.queue and self.queue[0][0] <= now:
            self.queue.popleft()
            self.served += 1

    def complete(self, now: float):
        """Retire every request whose service finished by ``now``."""
        self._drain(now)

    def fetch(self, data_id: int) -> DataItem:
        if data_id not in self.database:
            raise KeyError(f"unknown data id {data_id}")
        return DataItem(data_id, self.database.item_size(data_id), self.database.ttl(data_id))
