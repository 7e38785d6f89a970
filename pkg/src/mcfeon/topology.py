"""Network topology loading, validation and K-shortest route precomputation.

Topology documents are JSON with four fields: `nodes` (count), `links`
(list of {a, b, length_km}), `cores` (cores per link) and `core_adjacency`
(adjacent cores seen by any one core under the fiber's core layout).
NSFNet and COST239 ship as package data under mcfeon/data/.
"""

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, List, Tuple, Union

import networkx as nx

BUILTIN_TOPOLOGIES = ("nsfnet", "cost239")


class TopologyError(ValueError):
    """Raised when a topology document fails validation."""


@dataclass(frozen=True)
class Link:
    index: int
    a: int
    b: int
    length_km: float


@dataclass(frozen=True)
class RoutePath:
    """A loopless path, rank 1 being the shortest for its node pair."""

    nodes: Tuple[int, ...]
    link_ids: Tuple[int, ...]
    link_lengths_km: Tuple[float, ...]
    length_km: float
    rank: int

    @property
    def hops(self) -> int:
        return len(self.link_ids)


class Topology:
    """Immutable network graph with per-pair route tables.

    Safe to share read-only across concurrent simulation runs; all route
    lists are precomputed at construction.
    """

    def __init__(
        self,
        num_nodes: int,
        links: List[Link],
        cores: int,
        core_adjacency: int,
        k_routes: int = 5,
        name: str = "",
    ):
        if num_nodes < 2:
            raise TopologyError(f"nodes: need at least 2 nodes, got {num_nodes}")
        if cores < 1:
            raise TopologyError(f"cores: need at least 1 core per link, got {cores}")
        if core_adjacency < 0 or core_adjacency > max(cores - 1, 0):
            raise TopologyError(
                f"core_adjacency: must lie in [0, cores-1], got {core_adjacency}"
            )
        if k_routes < 1:
            raise TopologyError(f"k_routes: must be >= 1, got {k_routes}")
        seen_pairs = set()
        for link in links:
            if link.a == link.b:
                raise TopologyError(f"links[{link.index}]: self-loop at node {link.a}")
            for end in (link.a, link.b):
                if not (0 <= end < num_nodes):
                    raise TopologyError(
                        f"links[{link.index}]: node {end} outside [0, {num_nodes})"
                    )
            if not (link.length_km > 0):
                raise TopologyError(
                    f"links[{link.index}]: length_km must be > 0, got {link.length_km}"
                )
            key = (min(link.a, link.b), max(link.a, link.b))
            if key in seen_pairs:
                raise TopologyError(f"links[{link.index}]: duplicate link {key}")
            seen_pairs.add(key)

        self.name = name
        self.num_nodes = num_nodes
        self.links = tuple(links)
        self.cores = cores
        self.core_adjacency = core_adjacency
        self.k_routes = k_routes

        self._graph = nx.Graph()
        self._graph.add_nodes_from(range(num_nodes))
        self._link_by_pair: Dict[Tuple[int, int], Link] = {}
        for link in links:
            self._graph.add_edge(link.a, link.b, length_km=link.length_km)
            self._link_by_pair[(link.a, link.b)] = link
            self._link_by_pair[(link.b, link.a)] = link
        if not nx.is_connected(self._graph):
            raise TopologyError("links: graph is not connected")

        self.routes: Dict[Tuple[int, int], Tuple[RoutePath, ...]] = {}
        for src in range(num_nodes):
            for dst in range(num_nodes):
                if src != dst:
                    self.routes[(src, dst)] = tuple(
                        k_shortest_paths(self, src, dst, k_routes)
                    )

    def link_between(self, a: int, b: int) -> Link:
        return self._link_by_pair[(a, b)]

    @property
    def graph(self) -> nx.Graph:
        return self._graph

    def path_from_nodes(self, nodes: List[int], rank: int) -> RoutePath:
        """Build a RoutePath from a node sequence, resolving link records."""
        link_ids = []
        lengths = []
        for a, b in zip(nodes, nodes[1:]):
            link = self._link_by_pair.get((a, b))
            if link is None:
                raise TopologyError(f"no link between {a} and {b}")
            link_ids.append(link.index)
            lengths.append(link.length_km)
        return RoutePath(
            nodes=tuple(nodes),
            link_ids=tuple(link_ids),
            link_lengths_km=tuple(lengths),
            length_km=sum(lengths),
            rank=rank,
        )


def k_shortest_paths(topology: Topology, src: int, dst: int, k: int) -> List[RoutePath]:
    """Up to k loopless paths sorted by length, shortest first.

    Equal-length paths are ordered by their node sequences so the route
    table is reproducible across runs.
    """
    if src == dst:
        raise ValueError("src and dst must differ")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    graph = topology.graph
    if not nx.has_path(graph, src, dst):
        raise TopologyError(f"no path between {src} and {dst}")

    def path_length(nodes):
        return sum(
            graph[a][b]["length_km"] for a, b in zip(nodes, nodes[1:])
        )

    # Pull simple paths in length order, keeping any that tie with the k-th
    # so the lexicographic tiebreak sees every candidate.
    candidates: List[Tuple[float, Tuple[int, ...]]] = []
    cutoff = None
    for nodes in nx.shortest_simple_paths(graph, src, dst, weight="length_km"):
        length = path_length(nodes)
        if cutoff is not None and length > cutoff:
            break
        candidates.append((length, tuple(nodes)))
        if len(candidates) >= k and cutoff is None:
            cutoff = candidates[k - 1][0]
    candidates.sort(key=lambda item: (item[0], item[1]))
    return [
        topology.path_from_nodes(list(nodes), rank)
        for rank, (_, nodes) in enumerate(candidates[:k], start=1)
    ]


def _builtin_path(name: str) -> Path:
    return Path(str(resources.files("mcfeon").joinpath(f"data/{name}.json")))


def load_topology(
    source: Union[str, Path, dict], k_routes: int = 5
) -> Topology:
    """Load and validate a topology document.

    `source` is a file path, a builtin name ("nsfnet" or "cost239"), or an
    already-parsed document dict.
    """
    name = ""
    if isinstance(source, dict):
        doc = source
    else:
        path = Path(source)
        if not path.exists() and str(source).lower() in BUILTIN_TOPOLOGIES:
            path = _builtin_path(str(source).lower())
        name = path.stem
        try:
            doc = json.loads(path.read_text())
        except FileNotFoundError:
            raise TopologyError(f"topology document not found: {source}") from None
        except json.JSONDecodeError as exc:
            raise TopologyError(f"topology document does not parse: {exc}") from None

    for field in ("nodes", "links", "cores", "core_adjacency"):
        if field not in doc:
            raise TopologyError(f"{field}: missing required field")
    if not isinstance(doc["nodes"], int):
        raise TopologyError(f"nodes: expected integer count, got {doc['nodes']!r}")

    links = []
    for i, entry in enumerate(doc["links"]):
        try:
            a, b, length = entry["a"], entry["b"], entry["length_km"]
        except (TypeError, KeyError):
            raise TopologyError(
                f"links[{i}]: expected object with a, b, length_km"
            ) from None
        if not isinstance(a, int) or not isinstance(b, int):
            raise TopologyError(f"links[{i}]: endpoints must be integers")
        links.append(Link(index=i, a=a, b=b, length_km=float(length)))

    return Topology(
        num_nodes=doc["nodes"],
        links=links,
        cores=int(doc["cores"]),
        core_adjacency=int(doc["core_adjacency"]),
        k_routes=k_routes,
        name=doc.get("name", name),
    )
