"""Baseline RMSCA policies: first-fit, random-fit and bitrate-partitioned spectrum.

Every policy walks candidate routes shortest-first and either returns a
Decision the engine will accept or the blocking cause of the stage that
got furthest (crosstalk > spectrum > reach > no_route), so rejection
accounting matches the engine's validation order.
"""

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .engine import (
    CAUSE_CROSSTALK,
    CAUSE_NO_ROUTE,
    CAUSE_ORDER,
    CAUSE_REACH,
    CAUSE_SPECTRUM,
    Decision,
    Simulation,
)
from .traffic import ConnectionRequest

POLICY_NAMES = ("ksp-ff-fca", "ksp-rf-rca", "ksp-scma")

Verdict = Union[Decision, str]


def _worse(stage: str, cause: str) -> str:
    return cause if CAUSE_ORDER[cause] > CAUSE_ORDER[stage] else stage


def _first_fit_decide(
    sim: Simulation,
    req: ConnectionRequest,
    region_mask: Optional[int] = None,
) -> Verdict:
    """Shared scan: routes by rank, cores ascending, lowest feasible start.

    Placements whose crosstalk would breach the route's modulation
    threshold are skipped rather than proposed.
    """
    stage = CAUSE_NO_ROUTE
    grid = sim.grid
    occupancy_aware = sim.cfg.xt.occupancy_aware
    for rank, info in enumerate(sim.route_infos(req.src, req.dst), start=1):
        if info.modulation is None:
            stage = _worse(stage, CAUSE_REACH)
            continue
        need = sim.required_total_slots(info, req.bitrate_gbps)
        links = info.route.link_ids
        route_had_fit = False
        for core in range(sim.topology.cores):
            if occupancy_aware:
                for block in grid.find_blocks(
                    links, core, need, max_blocks=sim.cfg.slots, region_mask=region_mask
                ):
                    route_had_fit = True
                    if sim.xt_accepts(info, core, block.start, need):
                        return Decision(rank, core, block.start, absolute=True)
            else:
                start = grid.first_fit(links, core, need, region_mask=region_mask)
                if start is not None:
                    route_had_fit = True
                    if info.xt_ok:
                        return Decision(rank, core, start, absolute=True)
                    break  # worst-case XT is per-route; no core can pass
        if route_had_fit:
            stage = _worse(stage, CAUSE_CROSSTALK)
        else:
            stage = _worse(stage, CAUSE_SPECTRUM)
    return stage


class KspFfFca:
    """Shortest route first, first-fit spectrum, lowest crosstalk-clean core."""

    name = "ksp-ff-fca"

    def decide(self, sim: Simulation, req: ConnectionRequest) -> Verdict:
        return _first_fit_decide(sim, req)


class KspRfRca:
    """Routes in rank order, then a uniformly random feasible (core, block)."""

    name = "ksp-rf-rca"

    def __init__(self, seed=12345):
        self._rng = np.random.default_rng(seed)

    def decide(self, sim: Simulation, req: ConnectionRequest) -> Verdict:
        stage = CAUSE_NO_ROUTE
        grid = sim.grid
        for rank, info in enumerate(sim.route_infos(req.src, req.dst), start=1):
            if info.modulation is None:
                stage = _worse(stage, CAUSE_REACH)
                continue
            need = sim.required_total_slots(info, req.bitrate_gbps)
            links = info.route.link_ids
            candidates: List[Tuple[int, int]] = []
            route_had_fit = False
            for core in range(sim.topology.cores):
                for block in grid.find_blocks(links, core, need, max_blocks=sim.cfg.slots):
                    route_had_fit = True
                    if sim.xt_accepts(info, core, block.start, need):
                        candidates.append((core, block.start))
            if candidates:
                core, start = candidates[int(self._rng.integers(len(candidates)))]
                return Decision(rank, core, start, absolute=True)
            stage = _worse(stage, CAUSE_CROSSTALK if route_had_fit else CAUSE_SPECTRUM)
        return stage


def default_partitions(slots: int) -> List[Tuple[float, int, int]]:
    """Two bitrate classes split at 62.5 Gbps over the lower/upper half of the spectrum."""
    half = slots // 2
    return [(62.5, 0, half), (float("inf"), half, slots)]


class KspScma:
    """Bitrate classes own disjoint spectrum regions; first-fit inside the class region.

    Strict partitioning: a request whose region is full is blocked even when
    other regions have room.
    """

    name = "ksp-scma"

    def __init__(
        self,
        slots: int,
        partitions: Optional[Sequence[Tuple[float, int, int]]] = None,
    ):
        parts = sorted(partitions or default_partitions(slots))
        expected_lo = 0
        for ub, lo, hi in parts:
            if lo != expected_lo or hi <= lo:
                raise ValueError(
                    f"scma partitions must tile [0, {slots}) without overlap; "
                    f"bad region [{lo}, {hi})"
                )
            expected_lo = hi
        if expected_lo != slots:
            raise ValueError(
                f"scma partitions cover [0, {expected_lo}) but the grid has {slots} slots"
            )
        self._partitions = [
            (ub, ((1 << (hi - lo)) - 1) << lo) for ub, lo, hi in parts
        ]

    def _region_mask(self, bitrate_gbps: float) -> int:
        for ub, mask in self._partitions:
            if bitrate_gbps <= ub:
                return mask
        return self._partitions[-1][1]

    def decide(self, sim: Simulation, req: ConnectionRequest) -> Verdict:
        return _first_fit_decide(sim, req, region_mask=self._region_mask(req.bitrate_gbps))


def make_policy(
    name: str,
    slots: int = 100,
    seed=12345,
    scma_partitions: Optional[Sequence[Tuple[float, int, int]]] = None,
):
    if name == "ksp-ff-fca":
        return KspFfFca()
    if name == "ksp-rf-rca":
        return KspRfRca(seed=seed)
    if name == "ksp-scma":
        return KspScma(slots, scma_partitions)
    raise ValueError(f"unknown policy {name!r}; choose from {', '.join(POLICY_NAMES)}")
