"""Road graphs with a designated origin and shortest-travel-time queries.

Graphs are undirected, edge weights are travel times in minutes. Solvers
never touch the graph directly; they query a TravelTimeMatrix restricted
to the terminals they need (the origin plus the current destinations).
Small graphs get a dense all-pairs solve, large ones one single-source
pass per terminal.
"""

import heapq
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _sp_dijkstra
from scipy.sparse.csgraph import floyd_warshall as _sp_floyd_warshall

FW_NODE_THRESHOLD = 2000


class ConnectivityError(RuntimeError):
    """A required vertex is not reachable from the queried source."""


@dataclass(frozen=True)
class RoadGraph:
    """Undirected weighted graph; weights are travel times in minutes."""

    nodes: tuple  # (id, x_km, y_km) triples
    edges: tuple  # (u, v, time_min) triples, at most one per node pair
    origin: int

    def __post_init__(self):
        ids = [nid for nid, _, _ in self.nodes]
        id_set = set(ids)
        if len(id_set) != len(ids):
            raise ValueError("duplicate node ids")
        if self.origin not in id_set:
            raise ValueError(f"origin {self.origin} is not a node")
        seen = set()
        for u, v, t in self.edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if u not in id_set or v not in id_set:
                raise ValueError(f"edge ({u}, {v}) references unknown node")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add(key)
            if not (t > 0 and np.isfinite(t)):
                raise ValueError(f"edge ({u}, {v}) has non-positive time {t}")

    @cached_property
    def node_ids(self) -> tuple:
        return tuple(nid for nid, _, _ in self.nodes)

    @cached_property
    def _index(self) -> dict:
        return {nid: i for i, (nid, _, _) in enumerate(self.nodes)}

    @cached_property
    def _adjacency(self) -> dict:
        adj = {nid: [] for nid in self.node_ids}
        for u, v, t in self.edges:
            adj[u].append((v, float(t)))
            adj[v].append((u, float(t)))
        return adj

    def positions(self) -> dict:
        return {nid: (x, y) for nid, x, y in self.nodes}


@dataclass(frozen=True)
class TravelTimeMatrix:
    """Pairwise shortest travel times over a fixed terminal set."""

    terminals: tuple
    times: np.ndarray  # square, minutes, times[i][j] between terminals i and j

    @cached_property
    def _index(self) -> dict:
        return {t: i for i, t in enumerate(self.terminals)}

    def index_of(self, node) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise ValueError(f"node {node} is not a terminal") from None

    def time(self, a, b) -> float:
        return float(self.times[self.index_of(a), self.index_of(b)])


def shortest_times_from(graph: RoadGraph, source) -> dict:
    """Exact shortest travel times from `source` to every reachable node.

    Plain binary-heap Dijkstra over the adjacency lists. Unreachable nodes
    are absent from the result.
    """
    if source not in graph._index:
        raise ValueError(f"unknown source node {source}")
    adj = graph._adjacency
    dist = {source: 0.0}
    done = set()
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, t in adj[u]:
            nd = d + t
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def _to_csr(graph: RoadGraph) -> csr_matrix:
    n = len(graph.nodes)
    idx = graph._index
    if not graph.edges:
        return csr_matrix((n, n))
    rows, cols, vals = [], [], []
    for u, v, t in graph.edges:
        iu, iv = idx[u], idx[v]
        rows.append(iu)
        cols.append(iv)
        vals.append(float(t))
    return csr_matrix((vals, (rows, cols)), shape=(n, n))


def build_travel_time_matrix(
    graph: RoadGraph,
    terminals,
    *,
    fw_node_threshold: int = FW_NODE_THRESHOLD,
) -> TravelTimeMatrix:
    """Shortest times between every pair of terminals.

    Below `fw_node_threshold` nodes this runs dense Floyd-Warshall over the
    whole graph and slices out the terminal rows; above it, one Dijkstra
    per terminal. The two strategies agree to roundoff and tests hold them
    to 1e-9 of each other.
    """
    terminals = tuple(terminals)
    if not terminals:
        raise ValueError("terminal set is empty")
    idx = graph._index
    try:
        term_idx = np.array([idx[t] for t in terminals], dtype=np.intp)
    except KeyError as exc:
        raise ValueError(f"unknown terminal id {exc.args[0]}") from None
    csg = _to_csr(graph)
    if len(graph.nodes) <= fw_node_threshold:
        full = _sp_floyd_warshall(csg, directed=False)
        times = full[np.ix_(term_idx, term_idx)]
    else:
        rows = _sp_dijkstra(csg, directed=False, indices=term_idx)
        times = rows[:, term_idx]
    if not np.all(np.isfinite(times)):
        bad = int(np.argwhere(~np.isfinite(times))[0][1])
        raise ConnectivityError(
            f"terminal {terminals[bad]} is not reachable from every other terminal"
        )
    # one shortest path can sum in two orders depending on direction; keep
    # the matrix exactly symmetric
    times = np.minimum(times, times.T)
    np.fill_diagonal(times, 0.0)
    return TravelTimeMatrix(terminals=terminals, times=times)


def generate_random_graph(n_vertices: int, seed, *, side_km: float = 30.0) -> RoadGraph:
    """Random road-like graph on a square patch of plane.

    Vertices land uniformly on a side_km x side_km square. Each pair gets an
    edge with probability d / d_max (longer hops are more likely, taken at
    face value), and the edge's travel time is its straight-line distance in
    km times Uniform(1, 2), read as minutes at 1 km/min. If the result is
    disconnected, the shortest straight-line edges joining components are
    added. Deterministic per seed; origin is a random vertex.

    Pair sampling is quadratic in n_vertices; intended for graphs up to a
    few thousand nodes. Larger maps should be imported from files.
    """
    if n_vertices < 1:
        raise ValueError("n_vertices must be >= 1")
    rng = np.random.default_rng(seed)
    xy = rng.uniform(0.0, side_km, size=(n_vertices, 2))
    origin = int(rng.integers(n_vertices))
    nodes = tuple((i, float(xy[i, 0]), float(xy[i, 1])) for i in range(n_vertices))
    if n_vertices == 1:
        return RoadGraph(nodes=nodes, edges=(), origin=origin)

    iu, iv = np.triu_indices(n_vertices, k=1)
    d = np.hypot(xy[iu, 0] - xy[iv, 0], xy[iu, 1] - xy[iv, 1])
    d_max = float(d.max())
    keep = rng.uniform(size=d.shape) < d / d_max
    mult = rng.uniform(1.0, 2.0, size=d.shape)

    parent = list(range(n_vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    edges = []
    for j in np.flatnonzero(keep):
        u, v = int(iu[j]), int(iv[j])
        edges.append((u, v, float(d[j] * mult[j])))
        parent[find(u)] = find(v)

    # join remaining components with their shortest straight-line bridges
    if len({find(i) for i in range(n_vertices)}) > 1:
        order = np.lexsort((iv, iu, d))
        bridges = []
        for j in order:
            u, v = int(iu[j]), int(iv[j])
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                bridges.append(j)
                if len({find(i) for i in range(n_vertices)}) == 1:
                    break
        bridge_mult = rng.uniform(1.0, 2.0, size=len(bridges))
        for j, m in zip(bridges, bridge_mult):
            edges.append((int(iu[j]), int(iv[j]), float(d[j] * m)))

    return RoadGraph(nodes=nodes, edges=tuple(edges), origin=origin)


def crop_to_k_nearest(graph: RoadGraph, k: int) -> RoadGraph:
    """Keep the k nodes closest to the origin by shortest travel time.

    Ties break by ascending node id; the origin (time 0) is always kept and
    unreachable nodes are always dropped. Because edge times are strictly
    positive, every vertex on a kept node's shortest path is itself at least
    as close to the origin, so the kept set is closed under shortest paths
    and origin times are preserved without any repair step (tests verify by
    recomputation).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    dist = shortest_times_from(graph, graph.origin)
    ranked = sorted(dist, key=lambda nid: (dist[nid], nid))
    kept = set(ranked[: min(k, len(ranked))])
    nodes = tuple(nd for nd in graph.nodes if nd[0] in kept)
    edges = tuple(e for e in graph.edges if e[0] in kept and e[1] in kept)
    return RoadGraph(nodes=nodes, edges=edges, origin=graph.origin)


def write_graph(graph: RoadGraph, path) -> None:
    """Write the combined text format: origin header, then N and E lines."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#origin {graph.origin}\n")
        for nid, x, y in graph.nodes:
            fh.write(f"N {nid} {x!r} {y!r}\n")
        for u, v, t in graph.edges:
            fh.write(f"E {u} {v} {t!r}\n")


def read_graph(path) -> RoadGraph:
    """Read the combined text format written by write_graph."""
    origin = None
    nodes, edges = [], []
    seen_pairs = set()
    with open(path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "#origin":
                    if len(parts) != 2:
                        raise ValueError("expected '#origin <id>'")
                    origin = int(parts[1])
                elif parts[0] == "N":
                    if len(parts) != 4:
                        raise ValueError("expected 'N <id> <x> <y>'")
                    nodes.append((int(parts[1]), float(parts[2]), float(parts[3])))
                elif parts[0] == "E":
                    if len(parts) != 4:
                        raise ValueError("expected 'E <u> <v> <t>'")
                    u, v, t = int(parts[1]), int(parts[2]), float(parts[3])
                    key = (u, v) if u < v else (v, u)
                    if key in seen_pairs:
                        raise ValueError(f"duplicate edge ({u}, {v})")
                    seen_pairs.add(key)
                    edges.append((u, v, t))
                else:
                    raise ValueError(f"unrecognized record {parts[0]!r}")
            except ValueError as exc:
                raise ValueError(f"{path}: line {ln}: {exc}") from None
    if origin is None:
        raise ValueError(f"{path}: missing '#origin' header")
    return RoadGraph(nodes=tuple(nodes), edges=tuple(edges), origin=origin)


def write_node_edge_files(graph: RoadGraph, nodes_path, edges_path) -> None:
    """Write the two-file CSV format (`id,x_km,y_km` and `u,v,time_min`)."""
    with open(nodes_path, "w", encoding="utf-8", newline="\n") as fh:
        for nid, x, y in graph.nodes:
            fh.write(f"{nid},{x!r},{y!r}\n")
    with open(edges_path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v, t in graph.edges:
            fh.write(f"{u},{v},{t!r}\n")


def read_node_edge_files(nodes_path, edges_path, origin: int) -> RoadGraph:
    """Read the two-file CSV format; the origin id is supplied by the caller."""
    nodes, edges = [], []
    with open(nodes_path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{nodes_path}: line {ln}: expected 'id,x_km,y_km'")
            try:
                nodes.append((int(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError:
                raise ValueError(f"{nodes_path}: line {ln}: bad numeric field") from None
    seen_pairs = set()
    with open(edges_path, "r", encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{edges_path}: line {ln}: expected 'u,v,time_min'")
            try:
                u, v, t = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise ValueError(f"{edges_path}: line {ln}: bad numeric field") from None
            key = (u, v) if u < v else (v, u)
            if key in seen_pairs:
                raise ValueError(f"{edges_path}: line {ln}: duplicate edge ({u}, {v})")
            seen_pairs.add(key)
            edges.append((u, v, t))
    return RoadGraph(nodes=tuple(nodes), edges=tuple(edges), origin=origin)
