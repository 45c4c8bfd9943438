"""Flat ``key = value`` run configuration.

Defaults follow the published simulation table where it gives a value;
the rest are modelling choices exposed for sweeps. Lines starting with
``#`` are comments. Unknown keys are rejected with their line number.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Union

from .geometry import NetworkConfig
from .radio import RadioConfig
from .workload import WorkloadConfig

CONFIG_ENV = "CCNSIM_CONFIG"
SCHEMES = ("ccn", "nc")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass(frozen=True)
class SimConfig:
    scheme: str = "ccn"
    seed: int = 1
    sim_time: float = 3600.0
    area_width: float = 1000.0
    area_height: float = 1000.0
    node_density: int = 40
    transmission_range: float = 500.0
    speed_min: float = 1.0
    speed_max: float = 10.0
    pause_time: float = 200.0
    n_items: int = 1000
    cache_pct: float = 40.0
    s_min: int = 1
    s_max: int = 10
    mean_query_interval: float = 10.0
    zipf_theta: float = 0.8
    ttl_min: float = 500.0
    ttl_max: float = 3000.0
    alpha: float = 2.0
    power_constant: float = 0.0
    rx_cost: float = 1.0
    idle_power: float = 0.01
    prop_delay: float = 0.002
    t1: float = 0.010
    refresh_period: float = 30.0
    skip_empty_zones: bool = True
    hop_limit: int = 3
    flood_timeout: float = 0.05
    server_x: float = 500.0
    server_y: float = 500.0
    server_delay: float = 0.008
    server_link_delay: float = 0.0
    queries_enabled: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not 0 < self.cache_pct <= 100:
            raise ConfigError(f"cache_pct must lie in (0, 100], got {self.cache_pct}")
        if self.node_density < 1:
            raise ConfigError("node_density must be >= 1")
        if self.sim_time <= 0:
            raise ConfigError("sim_time must be positive")
        if not 0 < self.speed_min <= self.speed_max:
            raise ConfigError("need 0 < speed_min <= speed_max")
        if self.hop_limit < 0:
            raise ConfigError("hop_limit must be non-negative")
        for name in ("pause_time", "t1", "refresh_period", "flood_timeout",
                     "server_delay", "server_link_delay"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.t1 <= 0 or self.refresh_period <= 0:
            raise ConfigError("t1 and refresh_period must be positive")
        try:
            self.network()
            self.radio()
            self.workload()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def network(self) -> NetworkConfig:
        return NetworkConfig(self.area_width, self.area_height, self.transmission_range,
                             self.alpha, max(self.node_density, 2), self.seed)

    def radio(self) -> RadioConfig:
        return RadioConfig(self.alpha, self.rx_cost, self.idle_power, self.prop_delay,
                           self.power_constant)

    def workload(self) -> WorkloadConfig:
        return WorkloadConfig(self.n_items, self.zipf_theta, self.mean_query_interval,
                              self.s_min, self.s_max, self.ttl_min, self.ttl_max, self.seed)

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def to_lines(self) -> list[str]:
        return [f"{f.name} = {_format(getattr(self, f.name))}" for f in fields(self)]


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _coerce(kind: type, raw: str):
    if kind is bool:
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    return raw


_TYPES = {"int": int, "float": float, "bool": bool, "str": str}


def parse_config(text: str, path: str | None = None, base: SimConfig | None = None) -> SimConfig:
    known = {f.name: _TYPES[f.type] for f in fields(SimConfig)}
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value', got {line.strip()!r}", lineno, path)
        key, raw = (s.strip() for s in stripped.split("=", 1))
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", lineno, path)
        try:
            values[key] = _coerce(known[key], raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}", lineno, path) from None
    try:
        return dataclasses.replace(base or SimConfig(), **values)
    except ConfigError as exc:
        raise ConfigError(str(exc), None, path) from None


def load_config(path: Union[str, Path, None] = None) -> SimConfig:
    """Read a config file; falls back to ``$CCNSIM_CONFIG``, then to defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV)
        if not path:
            return SimConfig()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {str(p)!r}: {exc.strerror}") from None
    return parse_config(text, str(p))
