"""Agent-facing environment: episode loop, action decoding, observations, +/-1 reward.

The action is three integers (route rank, core, block choice). Observations
flatten, in fixed order: source one-hot, destination one-hot, normalized
holding time, normalized requested slots, per-(route, core) qualifying
block features, the previous action and the previous reward. All features
stay inside [-1, 1]; absent entries use -1 sentinels with availability 0.
"""

from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .engine import Decision, Outcome, SimConfig, Simulation
from .topology import Topology
from .traffic import ConnectionRequest, TrafficConfig

ACTION_MODES = ("block_index", "absolute_slot")
REWARD_FEATURES = ("previous", "cumulative")


@dataclass
class EpisodeConfig:
    requests_per_episode: int = 50
    reset_state_on_episode: bool = True
    action_mode: str = "block_index"
    blocks_per_pair: int = 1  # J: qualifying blocks advertised per (route, core)
    features_per_block: int = 3  # 3 = start/size/availability, 1 = availability only
    reward_feature: str = "previous"

    def validate(self) -> None:
        if self.requests_per_episode < 1:
            raise ValueError(
                f"rl.requests_per_episode must be >= 1, got {self.requests_per_episode}"
            )
        if self.action_mode not in ACTION_MODES:
            raise ValueError(
                f"rl.action_mode must be one of {ACTION_MODES}, got {self.action_mode!r}"
            )
        if self.blocks_per_pair < 1:
            raise ValueError(
                f"rl.blocks_per_pair must be >= 1, got {self.blocks_per_pair}"
            )
        if self.features_per_block not in (1, 3):
            raise ValueError(
                f"rl.features_per_block must be 1 or 3, got {self.features_per_block}"
            )
        if self.reward_feature not in REWARD_FEATURES:
            raise ValueError(
                f"rl.reward_feature must be one of {REWARD_FEATURES}, "
                f"got {self.reward_feature!r}"
            )


class RmscaEnv:
    """Reset/step environment over one simulation instance.

    One instance per training worker; never share an instance across
    threads. `seed(n)` rebuilds the traffic stream, so seed-then-reset
    always reproduces the same trajectory.
    """

    INFO_KEYS = ("cause", "route_rank", "core", "block_start", "block_size")

    def __init__(
        self,
        topology: Topology,
        sim_cfg: Optional[SimConfig] = None,
        traffic_cfg: Optional[TrafficConfig] = None,
        episode_cfg: Optional[EpisodeConfig] = None,
        seed: Optional[int] = None,
        paranoid: bool = False,
    ):
        self.topology = topology
        self.sim_cfg = sim_cfg or SimConfig()
        self.traffic_cfg = traffic_cfg or TrafficConfig(load_erlang=250.0)
        if seed is not None:
            self.traffic_cfg = replace(self.traffic_cfg, seed=seed)
        self.episode_cfg = episode_cfg or EpisodeConfig()
        self.episode_cfg.validate()
        self.paranoid = paranoid

        self._sim: Optional[Simulation] = None
        self._pending: Optional[ConnectionRequest] = None
        self._steps = 0
        self._episode_return = 0.0
        self._prev_action = (-1.0, -1.0, -1.0)
        self._prev_reward = 0.0

    # -- space geometry ----------------------------------------------------

    @property
    def k_routes(self) -> int:
        return self.topology.k_routes

    @property
    def cores(self) -> int:
        return self.topology.cores

    @property
    def action_space_shape(self) -> List[int]:
        third = (
            self.episode_cfg.blocks_per_pair
            if self.episode_cfg.action_mode == "block_index"
            else self.sim_cfg.slots
        )
        return [self.k_routes, self.cores, third]

    @property
    def observation_length(self) -> int:
        n = self.topology.num_nodes
        routes_state = (
            self.k_routes
            * self.cores
            * self.episode_cfg.blocks_per_pair
            * self.episode_cfg.features_per_block
        )
        return 2 * n + 2 + routes_state + 4

    def descriptor(self) -> Dict:
        """Machine-readable contract for adapters and external trainers."""
        return {
            "id": "DeepRMSCA-v0",
            "action_space": list(self.action_space_shape),
            "action_mode": self.episode_cfg.action_mode,
            "observation_length": self.observation_length,
            "reward_range": [-1.0, 1.0],
            "requests_per_episode": self.episode_cfg.requests_per_episode,
            "info_keys": list(self.INFO_KEYS),
        }

    # -- lifecycle -----------------------------------------------------------

    def seed(self, n: int) -> None:
        """Pin the traffic stream; takes effect at the next reset."""
        self.traffic_cfg = replace(self.traffic_cfg, seed=n)
        self._sim = None
        self._pending = None

    def reset(self) -> np.ndarray:
        if self._sim is None:
            self._sim = Simulation(
                self.topology, self.sim_cfg, self.traffic_cfg, paranoid=self.paranoid
            )
            self._pending = None
        elif self.episode_cfg.reset_state_on_episode:
            self._sim.clear_state()
        self._steps = 0
        self._episode_return = 0.0
        self._prev_action = (-1.0, -1.0, -1.0)
        self._prev_reward = 0.0
        if self._pending is None:
            self._pending = self._sim.advance()
        return self.build_observation(self._pending)

    def step(self, action: Sequence[int]) -> Tuple[np.ndarray, float, bool, Dict]:
        if self._sim is None or self._pending is None:
            raise RuntimeError("call reset() before step()")
        k, c, j = (int(action[0]), int(action[1]), int(action[2]))
        decision = Decision(
            route_rank=k + 1,
            core=c,
            j=j,
            absolute=self.episode_cfg.action_mode == "absolute_slot",
        )
        outcome = self._sim.try_establish(self._pending, decision)
        reward = 1.0 if outcome.established else -1.0
        self._steps += 1
        self._episode_return += reward
        self._prev_action = self._normalize_action(k, c, j)
        self._prev_reward = reward
        done = self._steps >= self.episode_cfg.requests_per_episode
        info = self._info(outcome)
        self._pending = self._sim.advance()
        return self.build_observation(self._pending), reward, done, info

    def close(self) -> None:
        self._sim = None
        self._pending = None

    @property
    def stats(self):
        """Engine counters of the current simulation (None before reset)."""
        return self._sim.stats if self._sim else None

    # -- observation ---------------------------------------------------------

    def _normalize_action(self, k: int, c: int, j: int) -> Tuple[float, float, float]:
        shape = self.action_space_shape
        return tuple(
            min(max(v / max(n - 1, 1), -1.0), 1.0) for v, n in zip((k, c, j), shape)
        )

    def _info(self, outcome: Outcome) -> Dict:
        return {
            "cause": outcome.cause,
            "route_rank": outcome.route_rank,
            "core": outcome.core,
            "block_start": outcome.block_start,
            "block_size": outcome.block_size,
        }

    def build_observation(self, req: ConnectionRequest) -> np.ndarray:
        sim = self._sim
        cfg = self.episode_cfg
        n = self.topology.num_nodes
        slots = self.sim_cfg.slots
        features = np.zeros(self.observation_length, dtype=np.float32)

        features[req.src] = 1.0
        features[n + req.dst] = 1.0
        pos = 2 * n
        features[pos] = min(req.holding_time / (10.0 * self.traffic_cfg.mean_holding), 1.0)
        pos += 1

        infos = sim.route_infos(req.src, req.dst)
        requested = -1.0
        for info in infos:
            if info.modulation is not None:
                requested = sim.required_total_slots(info, req.bitrate_gbps) / slots
                break
        features[pos] = requested
        pos += 1

        j_count = cfg.blocks_per_pair
        f = cfg.features_per_block
        for k in range(self.k_routes):
            info = infos[k] if k < len(infos) else None
            usable = info is not None and info.modulation is not None
            if usable:
                need = sim.required_total_slots(info, req.bitrate_gbps)
                links = info.route.link_ids
            for core in range(self.cores):
                blocks = (
                    sim.grid.find_blocks(links, core, need, j_count) if usable else []
                )
                for j in range(j_count):
                    if j < len(blocks):
                        if f == 3:
                            features[pos] = blocks[j].start / slots
                            features[pos + 1] = blocks[j].size / slots
                            features[pos + 2] = 1.0
                        else:
                            features[pos] = 1.0
                    elif f == 3:
                        features[pos] = -1.0
                        features[pos + 1] = -1.0
                        features[pos + 2] = 0.0
                    pos += f

        features[pos : pos + 3] = self._prev_action
        pos += 3
        if cfg.reward_feature == "previous":
            features[pos] = self._prev_reward
        else:
            features[pos] = self._episode_return / cfg.requests_per_episode
        return features
