"""Random request stream: Poisson arrivals, exponential holding, uniform bitrates."""

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass
class TrafficConfig:
    load_erlang: float
    mean_holding: float = 1.0
    seed: int = 0
    bitrate_min: float = 25.0
    bitrate_max: float = 100.0
    # 0 keeps the bitrate continuous; a positive step snaps it to
    # bitrate_min + i*step (inclusive grid capped at bitrate_max).
    discrete_step: float = 0.0

    @property
    def arrival_rate(self) -> float:
        return self.load_erlang / self.mean_holding

    def validate(self) -> None:
        if not (self.load_erlang > 0):
            raise ValueError(f"traffic.load_erlang must be > 0, got {self.load_erlang}")
        if not (self.mean_holding > 0):
            raise ValueError(f"traffic.mean_holding must be > 0, got {self.mean_holding}")
        if not (0 < self.bitrate_min <= self.bitrate_max):
            raise ValueError(
                f"traffic bitrate range invalid: [{self.bitrate_min}, {self.bitrate_max}]"
            )
        if self.discrete_step < 0:
            raise ValueError(f"traffic.discrete_step must be >= 0, got {self.discrete_step}")


@dataclass(frozen=True)
class ConnectionRequest:
    id: int
    src: int
    dst: int
    bitrate_gbps: float
    arrival_time: float
    holding_time: float


class TrafficGenerator:
    """Seeded request source; identical seeds replay identical streams.

    Draws are buffered in fixed-size chunks so million-request runs spend
    almost no time in the RNG; the sequence for a given seed does not
    depend on chunk boundaries observed by the caller.
    """

    CHUNK = 8192

    def __init__(self, cfg: TrafficConfig, num_nodes: int):
        cfg.validate()
        if num_nodes < 2:
            raise ValueError(f"traffic needs >= 2 nodes, got {num_nodes}")
        self.cfg = cfg
        self.num_nodes = num_nodes
        self._rng = np.random.default_rng(cfg.seed)
        self._clock = 0.0
        self._next_id = 0
        self._pos = self.CHUNK  # force refill on first draw
        self._inter: Optional[np.ndarray] = None
        if cfg.discrete_step > 0:
            n_steps = int((cfg.bitrate_max - cfg.bitrate_min) / cfg.discrete_step) + 1
            self._bitrate_grid = cfg.bitrate_min + cfg.discrete_step * np.arange(n_steps)
        else:
            self._bitrate_grid = None

    def _refill(self) -> None:
        n = self.CHUNK
        rng = self._rng
        cfg = self.cfg
        self._inter = rng.exponential(1.0 / cfg.arrival_rate, n)
        self._hold = rng.exponential(cfg.mean_holding, n)
        self._src = rng.integers(0, self.num_nodes, n)
        # dst = src + uniform nonzero offset mod N: uniform over ordered pairs
        self._off = rng.integers(1, self.num_nodes, n)
        if self._bitrate_grid is not None:
            idx = rng.integers(0, len(self._bitrate_grid), n)
            self._bitrate = self._bitrate_grid[idx]
        else:
            self._bitrate = rng.uniform(cfg.bitrate_min, cfg.bitrate_max, n)
        self._pos = 0

    def next_request(self) -> ConnectionRequest:
        if self._pos >= self.CHUNK:
            self._refill()
        i = self._pos
        self._pos += 1
        self._clock += float(self._inter[i])
        src = int(self._src[i])
        dst = (src + int(self._off[i])) % self.num_nodes
        req = ConnectionRequest(
            id=self._next_id,
            src=src,
            dst=dst,
            bitrate_gbps=float(self._bitrate[i]),
            arrival_time=self._clock,
            holding_time=float(self._hold[i]),
        )
        self._next_id += 1
        return req
