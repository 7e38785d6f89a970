"""Independent oracles used across the test suite.

Everything here recomputes expectations from first principles (exhaustive
enumeration, per-slot scans, textbook recursions) without touching the
code paths under test, so a bug cannot cancel itself out.
"""

from typing import Dict, List, Optional, Sequence, Tuple

from mcfeon import physics


def enumerate_simple_paths(
    edges: Sequence[Tuple[int, int, float]], src: int, dst: int
) -> List[Tuple[float, Tuple[int, ...]]]:
    """All loopless paths by depth-first search over an explicit edge list."""
    adjacency: Dict[int, List[Tuple[int, float]]] = {}
    for a, b, length in edges:
        adjacency.setdefault(a, []).append((b, length))
        adjacency.setdefault(b, []).append((a, length))
    results: List[Tuple[float, Tuple[int, ...]]] = []

    def walk(node: int, visited: Tuple[int, ...], length: float) -> None:
        if node == dst:
            results.append((length, visited))
            return
        for nxt, step in adjacency.get(node, ()):
            if nxt not in visited:
                walk(nxt, visited + (nxt,), length + step)

    walk(src, (src,), 0.0)
    return results


def brute_force_k_shortest(
    edges: Sequence[Tuple[int, int, float]], src: int, dst: int, k: int
) -> List[Tuple[float, Tuple[int, ...]]]:
    """Top-k paths by (length, node sequence), from full enumeration."""
    paths = enumerate_simple_paths(edges, src, dst)
    paths.sort(key=lambda item: (item[0], item[1]))
    return paths[:k]


def scan_free_runs(
    occupancy_strings: Sequence[str], need: int
) -> List[Tuple[int, int]]:
    """Maximal jointly-free runs of size >= need from '0'/'1' occupancy dumps."""
    slots = len(occupancy_strings[0])
    free = [all(s[i] == "0" for s in occupancy_strings) for i in range(slots)]
    runs = []
    i = 0
    while i < slots:
        if free[i]:
            j = i
            while j < slots and free[j]:
                j += 1
            if j - i >= need:
                runs.append((i, j - i))
            i = j
        else:
            i += 1
    return runs


def erlang_b(servers: int, load: float) -> float:
    """Loss probability of an M/M/c/c system by the standard recursion."""
    b = 1.0
    for m in range(1, servers + 1):
        b = load * b / (m + load * b)
    return b


def best_feasible_decision(sim, req) -> Optional[Tuple[int, int, int]]:
    """Lexicographically smallest feasible (rank, core, start) by full scan.

    Uses only the grid's debug occupancy dumps and the public formula
    helpers; recomputes modulation, slot demand and worst-case crosstalk
    from scratch for every candidate.
    """
    formats = sim.cfg.formats()
    routes = sim.topology.routes[(req.src, req.dst)]
    slots = sim.cfg.slots
    for rank, route in enumerate(routes, start=1):
        modulation = physics.select_modulation(route.length_km, formats)
        if modulation is None:
            continue
        demand = physics.required_slots(
            req.bitrate_gbps, modulation, sim.cfg.guard_slots, sim.cfg.slot_ghz
        )
        need = demand.total
        xt_db = physics.route_xt_db(
            route.link_lengths_km, sim.cfg.xt, sim.topology.core_adjacency
        )
        if not physics.xt_feasible(xt_db, modulation):
            continue
        for core in range(sim.topology.cores):
            dumps = [sim.grid.occupancy_string(lid, core) for lid in route.link_ids]
            for start in range(slots - need + 1):
                if all(
                    dump[s] == "0" for dump in dumps for s in range(start, start + need)
                ):
                    return rank, core, start
    return None
