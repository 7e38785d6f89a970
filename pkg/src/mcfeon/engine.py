"""Event-driven core: request/release ordering, decision validation, blocking accounting.

A proposed allocation is validated in a fixed order -- route, reach,
spectrum, crosstalk -- so every rejection carries exactly one cause.
Departures at the same timestamp as an arrival are processed first,
freeing capacity before the arrival is offered.
"""

import heapq
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import physics
from .physics import ModulationFormat, XtParams
from .spectrum import SlotBlock, SpectrumGrid
from .topology import RoutePath, Topology
from .traffic import ConnectionRequest, TrafficConfig, TrafficGenerator

# Blocking causes, ordered by how far a request got through validation.
CAUSE_NO_ROUTE = "no_route"
CAUSE_REACH = "reach"
CAUSE_SPECTRUM = "spectrum"
CAUSE_CROSSTALK = "crosstalk"
CAUSES = (CAUSE_NO_ROUTE, CAUSE_REACH, CAUSE_SPECTRUM, CAUSE_CROSSTALK)
CAUSE_ORDER = {c: i for i, c in enumerate(CAUSES)}


@dataclass(frozen=True)
class Decision:
    """Agent or heuristic choice: route rank (1-based), core, and block.

    `j` selects among advertised qualifying blocks by default; with
    absolute=True it is the starting slot itself.
    """

    route_rank: int
    core: int
    j: int
    absolute: bool = False


@dataclass(frozen=True)
class Outcome:
    established: bool
    cause: Optional[str] = None
    connection_id: Optional[int] = None
    route_rank: Optional[int] = None
    core: Optional[int] = None
    block_start: Optional[int] = None
    block_size: Optional[int] = None


class BlockingStats:
    """Offered/established/blocked counters plus a windowed blocking series."""

    def __init__(self, window_size: int = 1000):
        if window_size < 1:
            raise ValueError(f"window_size must be >= 1, got {window_size}")
        self.window_size = window_size
        self.offered = 0
        self.established = 0
        self.blocked: Dict[str, int] = {c: 0 for c in CAUSES}
        self.windows: List[Tuple[int, int]] = []  # (offered, blocked) per window
        self._win_offered = 0
        self._win_blocked = 0

    def record(self, established: bool, cause: Optional[str] = None) -> None:
        self.offered += 1
        if established:
            self.established += 1
        else:
            self.blocked[cause] += 1
            self._win_blocked += 1
        self._win_offered += 1
        if self._win_offered == self.window_size:
            self.windows.append((self._win_offered, self._win_blocked))
            self._win_offered = 0
            self._win_blocked = 0

    @property
    def blocked_total(self) -> int:
        return sum(self.blocked.values())

    @property
    def blocking_probability(self) -> float:
        return self.blocked_total / self.offered if self.offered else 0.0

    def check(self) -> None:
        if self.offered != self.established + self.blocked_total:
            raise RuntimeError(
                f"stats drift: offered {self.offered} != established "
                f"{self.established} + blocked {self.blocked_total}"
            )

    def window_rows(self) -> List[Tuple[int, float]]:
        """(window_index, blocking) rows, including any partial tail window."""
        rows = [(i, blk / off) for i, (off, blk) in enumerate(self.windows)]
        if self._win_offered:
            rows.append((len(self.windows), self._win_blocked / self._win_offered))
        return rows

    def steady_blocking(self, skip_fraction: float = 0.1) -> float:
        """Blocking over the windows after the warm-up fraction of requests."""
        windows = list(self.windows)
        if self._win_offered:
            windows.append((self._win_offered, self._win_blocked))
        if not windows:
            return 0.0
        skip = skip_fraction * self.offered
        seen = offered = blocked = 0
        for off, blk in windows:
            if seen >= skip:
                offered += off
                blocked += blk
            seen += off
        if offered == 0:  # everything fell inside the warm-up
            return self.blocking_probability
        return blocked / offered


@dataclass
class SimConfig:
    slots: int = 100
    guard_slots: int = 1
    slot_ghz: float = physics.SLOT_WIDTH_GHZ
    enabled_modulations: Sequence[str] = physics.DEFAULT_ENABLED
    xt: XtParams = field(default_factory=XtParams)
    window_size: int = 1000

    def formats(self) -> tuple:
        return physics.formats_by_name(self.enabled_modulations)


@dataclass(frozen=True)
class RouteInfo:
    """Per-route values that never change during a run.

    Worst-case crosstalk counts every adjacent core as interfering, so it
    depends only on the route's link lengths and is cached here together
    with the reach-selected modulation.
    """

    route: RoutePath
    modulation: Optional[ModulationFormat]
    xt_db: float
    xt_ok: bool
    slot_capacity_gbps: float


def adjacent_cores(core: int, cores: int, degree: int) -> Tuple[int, ...]:
    """The `degree` nearest cores in ring order; all neighbours for degree >= cores-1."""
    neighbours: List[int] = []
    step = 1
    while len(neighbours) < min(degree, cores - 1):
        for cand in ((core + step) % cores, (core - step) % cores):
            if cand != core and cand not in neighbours and len(neighbours) < degree:
                neighbours.append(cand)
        step += 1
    return tuple(neighbours)


class Simulation:
    """One independent event-driven run over a shared read-only topology."""

    def __init__(
        self,
        topology: Topology,
        sim_cfg: SimConfig,
        traffic_cfg: TrafficConfig,
        paranoid: bool = False,
    ):
        self.topology = topology
        self.cfg = sim_cfg
        self.grid = SpectrumGrid(len(topology.links), topology.cores, sim_cfg.slots)
        self.stats = BlockingStats(sim_cfg.window_size)
        self.traffic = TrafficGenerator(traffic_cfg, topology.num_nodes)
        self.clock = 0.0
        self.events_processed = 0
        self.paranoid = paranoid
        self._departures: List[Tuple[float, int, int]] = []
        self._seq = 0
        self._adjacent = [
            adjacent_cores(c, topology.cores, topology.core_adjacency)
            for c in range(topology.cores)
        ]
        formats = sim_cfg.formats()
        self._route_infos: Dict[Tuple[int, int], Tuple[RouteInfo, ...]] = {}
        for pair, routes in topology.routes.items():
            self._route_infos[pair] = tuple(
                self._build_route_info(r, formats) for r in routes
            )

    def _build_route_info(self, route: RoutePath, formats) -> RouteInfo:
        modulation = physics.select_modulation(route.length_km, formats)
        xt_db = physics.route_xt_db(
            route.link_lengths_km, self.cfg.xt, self.topology.core_adjacency
        )
        xt_ok = modulation is not None and physics.xt_feasible(xt_db, modulation)
        capacity = (
            self.cfg.slot_ghz * modulation.bits_per_symbol if modulation else 0.0
        )
        return RouteInfo(
            route=route,
            modulation=modulation,
            xt_db=xt_db,
            xt_ok=xt_ok,
            slot_capacity_gbps=capacity,
        )

    # -- request-level helpers --------------------------------------------

    def route_infos(self, src: int, dst: int) -> Tuple[RouteInfo, ...]:
        return self._route_infos[(src, dst)]

    def required_total_slots(self, info: RouteInfo, bitrate_gbps: float) -> int:
        data = math.ceil(bitrate_gbps / info.slot_capacity_gbps)
        return max(data, 1) + self.cfg.guard_slots

    def occupied_xt_db(
        self, route: RoutePath, core: int, start: int, size: int
    ) -> float:
        """Crosstalk counting only adjacent cores with traffic overlapping the block."""
        block_mask = ((1 << size) - 1) << start
        masks = self.grid._masks
        n_per_link = []
        for lid in route.link_ids:
            row = masks[lid]
            n_per_link.append(
                sum(1 for adj in self._adjacent[core] if row[adj] & block_mask)
            )
        return physics.route_xt_db(route.link_lengths_km, self.cfg.xt, n_per_link)

    def xt_accepts(
        self, info: RouteInfo, core: int, start: int, size: int
    ) -> bool:
        """Crosstalk gate for a concrete placement, honouring the configured mode."""
        if not self.cfg.xt.occupancy_aware:
            return info.xt_ok
        xt_db = self.occupied_xt_db(info.route, core, start, size)
        return physics.xt_feasible(xt_db, info.modulation)

    # -- event loop --------------------------------------------------------

    def advance(self) -> ConnectionRequest:
        """Draw the next arrival, processing every departure due before it."""
        req = self.traffic.next_request()
        while self._departures and self._departures[0][0] <= req.arrival_time:
            _, _, conn_id = heapq.heappop(self._departures)
            self.process_departure(conn_id)
        self.clock = req.arrival_time
        return req

    def process_departure(self, conn_id: int) -> None:
        self.grid.release(conn_id)
        self.events_processed += 1
        if self.paranoid:
            self.grid.verify()
            self.stats.check()

    def try_establish(self, req: ConnectionRequest, d: Decision) -> Outcome:
        """Validate and commit a decision; every failure maps to one blocking cause.

        Out-of-range indices are ordinary spectrum rejections: agents in
        training feed arbitrary actions and must get a reward, not a crash.
        """
        infos = self.route_infos(req.src, req.dst)
        if not (1 <= d.route_rank <= self.topology.k_routes):
            return self._blocked(CAUSE_SPECTRUM)
        if d.route_rank > len(infos):
            return self._blocked(CAUSE_NO_ROUTE)
        info = infos[d.route_rank - 1]
        if info.modulation is None:
            return self._blocked(CAUSE_REACH)
        if not (0 <= d.core < self.topology.cores):
            return self._blocked(CAUSE_SPECTRUM)
        need = self.required_total_slots(info, req.bitrate_gbps)
        link_ids = info.route.link_ids
        if d.absolute:
            start = d.j
            if not self.grid.is_free(link_ids, d.core, start, need):
                return self._blocked(CAUSE_SPECTRUM)
        else:
            if d.j < 0:
                return self._blocked(CAUSE_SPECTRUM)
            blocks = self.grid.find_blocks(link_ids, d.core, need, d.j + 1)
            if len(blocks) <= d.j:
                return self._blocked(CAUSE_SPECTRUM)
            start = blocks[d.j].start
        if not self.xt_accepts(info, d.core, start, need):
            return self._blocked(CAUSE_CROSSTALK)

        conn_id = req.id
        self.grid.allocate(link_ids, d.core, SlotBlock(start, need), conn_id)
        self._seq += 1
        heapq.heappush(
            self._departures, (self.clock + req.holding_time, self._seq, conn_id)
        )
        self.stats.record(True)
        self._after_arrival()
        return Outcome(
            established=True,
            connection_id=conn_id,
            route_rank=d.route_rank,
            core=d.core,
            block_start=start,
            block_size=need,
        )

    def record_blocked(self, cause: str) -> Outcome:
        """Account a policy-side rejection (the policy found no candidate)."""
        return self._blocked(cause)

    def _blocked(self, cause: str) -> Outcome:
        self.stats.record(False, cause)
        self._after_arrival()
        return Outcome(established=False, cause=cause)

    def _after_arrival(self) -> None:
        self.events_processed += 1
        if self.paranoid:
            self.grid.verify()
            self.stats.check()

    def run(self, policy, num_requests: int, deep_check_every: int = 0):
        """Process `num_requests` arrivals under `policy` and return the stats.

        `policy.decide(sim, req)` returns either a Decision or a blocking
        cause string when it gives up.
        """
        for _ in range(num_requests):
            req = self.advance()
            verdict = policy.decide(self, req)
            if isinstance(verdict, Decision):
                self.try_establish(req, verdict)
            else:
                self.record_blocked(verdict)
            if deep_check_every and self.events_processed % deep_check_every == 0:
                self.grid.verify()
                self.stats.check()
        return self.stats

    def clear_state(self) -> None:
        """Drop all allocations, pending departures and counters; keep the clock."""
        self.grid.clear()
        self._departures.clear()
        self.stats = BlockingStats(self.cfg.window_size)
