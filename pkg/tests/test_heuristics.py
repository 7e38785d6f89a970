import numpy as np
import pytest

from helpers import best_feasible_decision
from mcfeon.engine import Decision, SimConfig, Simulation
from mcfeon.heuristics import (
    KspFfFca,
    KspRfRca,
    KspScma,
    default_partitions,
    make_policy,
)
from mcfeon.physics import XtParams
from mcfeon.spectrum import SlotBlock
from mcfeon.topology import load_topology
from mcfeon.traffic import ConnectionRequest, TrafficConfig

TWO_ROUTE_DOC = {
    "nodes": 3,
    "cores": 3,
    "core_adjacency": 2,
    "links": [
        {"a": 0, "b": 2, "length_km": 300},
        {"a": 2, "b": 1, "length_km": 300},
        {"a": 0, "b": 1, "length_km": 800},
    ],
}


def request(req_id=0, src=0, dst=1, bitrate=100.0):
    return ConnectionRequest(
        id=req_id,
        src=src,
        dst=dst,
        bitrate_gbps=bitrate,
        arrival_time=1.0,
        holding_time=1.0,
    )


def two_route_sim(slots=20, xt=None):
    topo = load_topology(TWO_ROUTE_DOC, k_routes=2)
    cfg = SimConfig(slots=slots, xt=xt or XtParams())
    return Simulation(topo, cfg, TrafficConfig(load_erlang=10.0, seed=0))


def scatter_background(sim, rng, attempts, max_size=5):
    """Random single-link allocations; keeps every grid invariant intact."""
    conn = 10_000
    for _ in range(attempts):
        link = int(rng.integers(len(sim.topology.links)))
        core = int(rng.integers(sim.topology.cores))
        size = int(rng.integers(1, max_size))
        blocks = sim.grid.find_blocks((link,), core, size, max_blocks=sim.cfg.slots)
        if not blocks:
            continue
        start = int(rng.choice([b.start for b in blocks]))
        sim.grid.allocate((link,), core, SlotBlock(start, size), conn)
        conn += 1


class TestFirstFit:
    def test_empty_network_first_slot(self, two_node):
        sim = Simulation(two_node, SimConfig(), TrafficConfig(load_erlang=1.0, seed=0))
        verdict = KspFfFca().decide(sim, request())
        assert verdict == Decision(1, 0, 0, absolute=True)

    def test_skips_full_core(self):
        sim = two_route_sim()
        # core 0 full on both links of the shortest route
        sim.grid.allocate((0,), 0, SlotBlock(0, 20), 900)
        sim.grid.allocate((1,), 0, SlotBlock(0, 20), 901)
        verdict = KspFfFca().decide(sim, request())
        assert verdict == Decision(1, 1, 0, absolute=True)

    def test_falls_through_to_longer_route(self):
        sim = two_route_sim()
        for core in range(3):
            sim.grid.allocate((0,), core, SlotBlock(0, 20), 900 + core)
        verdict = KspFfFca().decide(sim, request())
        assert verdict.route_rank == 2

    def test_blocked_when_everything_full(self):
        sim = two_route_sim()
        conn = 900
        for link in range(3):
            for core in range(3):
                sim.grid.allocate((link,), core, SlotBlock(0, 20), conn)
                conn += 1
        assert KspFfFca().decide(sim, request()) == "spectrum"

    def test_deterministic(self):
        sim = two_route_sim()
        rng = np.random.default_rng(3)
        scatter_background(sim, rng, 25)
        req = request(bitrate=61.0)
        policy = KspFfFca()
        first = policy.decide(sim, req)
        assert all(policy.decide(sim, req) == first for _ in range(5))

    def test_matches_enumeration_on_random_states(self):
        rng = np.random.default_rng(99)
        policy = KspFfFca()
        decisions = blocked = 0
        for trial in range(300):
            sim = two_route_sim()
            if trial % 2:  # alternate sparse and near-saturated states
                scatter_background(sim, rng, int(rng.integers(0, 40)))
            else:
                scatter_background(sim, rng, int(rng.integers(40, 120)), max_size=14)
            req = request(bitrate=float(rng.uniform(25, 100)))
            expected = best_feasible_decision(sim, req)
            verdict = policy.decide(sim, req)
            if expected is None:
                assert isinstance(verdict, str)
                blocked += 1
            else:
                rank, core, start = expected
                assert verdict == Decision(rank, core, start, absolute=True)
                decisions += 1
        assert decisions > 50 and blocked > 5  # both regimes exercised

    def test_crosstalk_blocked_route_reported(self):
        # strong coupling: spectrum fits everywhere but no route passes XT
        sim = two_route_sim(xt=XtParams(coupling_coefficient=0.05))
        verdict = KspFfFca().decide(sim, request())
        assert verdict == "crosstalk"
        assert best_feasible_decision(sim, request()) is None

    def test_every_decision_establishes(self, nsfnet):
        sim = Simulation(
            nsfnet, SimConfig(), TrafficConfig(load_erlang=1200.0, seed=8)
        )
        policy = KspFfFca()
        for _ in range(3000):
            req = sim.advance()
            verdict = policy.decide(sim, req)
            if isinstance(verdict, Decision):
                assert sim.try_establish(req, verdict).established
            else:
                sim.record_blocked(verdict)
        sim.grid.verify()


class TestRandomFit:
    def test_uniform_over_cores_on_empty_grid(self, two_node):
        sim = Simulation(two_node, SimConfig(), TrafficConfig(load_erlang=1.0, seed=0))
        policy = KspRfRca(seed=31)
        trials = 3000
        counts = [0, 0, 0]
        for _ in range(trials):
            verdict = policy.decide(sim, request())
            assert verdict.route_rank == 1 and verdict.j == 0
            counts[verdict.core] += 1
        p = 1 / 3
        se = np.sqrt(p * (1 - p) / trials)
        for count in counts:
            assert abs(count / trials - p) < 3 * se

    def test_single_candidate_always_chosen(self, two_node):
        sim = Simulation(two_node, SimConfig(), TrafficConfig(load_erlang=1.0, seed=0))
        sim.grid.allocate((0,), 0, SlotBlock(0, 100), 900)
        sim.grid.allocate((0,), 1, SlotBlock(0, 100), 901)
        sim.grid.allocate((0,), 2, SlotBlock(0, 7), 902)
        sim.grid.allocate((0,), 2, SlotBlock(10, 90), 903)
        policy = KspRfRca(seed=5)
        # exactly one feasible (core, block): slots [7,10) on core 2
        for _ in range(50):
            assert policy.decide(sim, request()) == Decision(1, 2, 7, absolute=True)

    def test_blocked_when_full(self, two_node):
        sim = Simulation(two_node, SimConfig(), TrafficConfig(load_erlang=1.0, seed=0))
        for core in range(3):
            sim.grid.allocate((0,), core, SlotBlock(0, 100), 900 + core)
        assert KspRfRca(seed=1).decide(sim, request()) == "spectrum"

    def test_prefers_earlier_route(self):
        sim = two_route_sim()
        policy = KspRfRca(seed=2)
        for _ in range(40):
            assert policy.decide(sim, request()).route_rank == 1

    def test_seeded_replay(self, two_node):
        sim = Simulation(two_node, SimConfig(), TrafficConfig(load_erlang=1.0, seed=0))
        a = [KspRfRca(seed=7).decide(sim, request()) for _ in range(0, 20)]
        b = [KspRfRca(seed=7).decide(sim, request()) for _ in range(0, 20)]
        assert a != []  # sanity
        # fresh policies with the same seed replay the same choices
        assert [v.core for v in a] != None
        assert [v.core for v in a] == [v.core for v in b]


class TestScma:
    PARTITIONS = [(62.5, 0, 50), (100.0, 50, 100)]

    def sim(self, topology):
        return Simulation(
            topology, SimConfig(), TrafficConfig(load_erlang=1.0, seed=0)
        )

    def test_low_bitrate_lands_in_lower_region(self, two_node):
        policy = KspScma(100, self.PARTITIONS)
        verdict = policy.decide(self.sim(two_node), request(bitrate=30.0))
        assert verdict.absolute and verdict.j < 50

    def test_high_bitrate_lands_in_upper_region(self, two_node):
        policy = KspScma(100, self.PARTITIONS)
        verdict = policy.decide(self.sim(two_node), request(bitrate=90.0))
        assert verdict.j >= 50

    def test_strict_partitioning_blocks_when_region_full(self, two_node):
        sim = self.sim(two_node)
        for core in range(3):  # lower region full on every core
            sim.grid.allocate((0,), core, SlotBlock(0, 50), 900 + core)
        policy = KspScma(100, self.PARTITIONS)
        assert policy.decide(sim, request(bitrate=30.0)) == "spectrum"
        # the upper region still serves its own class
        assert policy.decide(sim, request(bitrate=90.0)).j >= 50

    def test_falls_through_routes_within_region(self):
        topo = load_topology(TWO_ROUTE_DOC, k_routes=2)
        sim = self.sim(topo)
        partitions = [(62.5, 0, 10), (100.0, 10, 20)]
        for core in range(3):
            sim.grid.allocate((0,), core, SlotBlock(0, 10), 900 + core)
        policy = KspScma(20, partitions)
        verdict = policy.decide(sim, request(bitrate=30.0))
        assert verdict.route_rank == 2 and verdict.j < 10

    def test_default_partitions_split_at_midpoint(self):
        assert default_partitions(100) == [(62.5, 0, 50), (float("inf"), 50, 100)]

    @pytest.mark.parametrize(
        "bad",
        [
            [(62.5, 0, 60), (100.0, 50, 100)],  # overlap
            [(62.5, 0, 40), (100.0, 50, 100)],  # gap
            [(62.5, 0, 50), (100.0, 50, 90)],  # short coverage
            [(62.5, 5, 50), (100.0, 50, 100)],  # does not start at 0
        ],
    )
    def test_invalid_partitions_rejected(self, bad):
        with pytest.raises(ValueError, match="partition"):
            KspScma(100, bad)


class TestFactory:
    def test_known_names(self):
        assert isinstance(make_policy("ksp-ff-fca"), KspFfFca)
        assert isinstance(make_policy("ksp-rf-rca"), KspRfRca)
        assert isinstance(make_policy("ksp-scma", slots=100), KspScma)

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="ksp-ff-fca"):
            make_policy("best-fit")
