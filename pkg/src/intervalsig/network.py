"""Road-network and demand data model, TNTP text ingestion, and the
shortest-path machinery used to split demand over minimum-weight routes.

Node ids are 1-based as in TNTP files. Edges keep their file order; that
order indexes every per-edge array in the rest of the package.
"""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass, field

import numpy as np


class ParseError(ValueError):
    """Malformed instance text (reports the offending line)."""


class ValidationError(ValueError):
    """Structurally valid text with out-of-domain values."""


class NoPathError(ValueError):
    """Requested origin cannot reach the requested destination."""


@dataclass(frozen=True)
class Edge:
    id: int
    src: int
    dst: int
    capacity: float
    length: float
    free_flow: float
    b_coeff: float
    power: float
    speed: float = 0.0
    toll: float = 0.0
    link_type: float = 1.0


@dataclass
class Network:
    node_count: int
    edges: list[Edge]
    metadata: dict[str, str] = field(default_factory=dict, compare=False)
    # derived adjacency, built once; excluded from equality
    _out: list[list[tuple[int, int]]] = field(init=False, repr=False, compare=False)
    _in: list[list[tuple[int, int]]] = field(init=False, repr=False, compare=False)
    srcs: np.ndarray = field(init=False, repr=False, compare=False)
    dsts: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        out = [[] for _ in range(self.node_count + 1)]
        inc = [[] for _ in range(self.node_count + 1)]
        for e in self.edges:
            out[e.src].append((e.dst, e.id))
            inc[e.dst].append((e.src, e.id))
        self._out = out
        self._in = inc
        self.srcs = np.array([e.src for e in self.edges], dtype=np.int64)
        self.dsts = np.array([e.dst for e in self.edges], dtype=np.int64)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


@dataclass
class DemandTable:
    entries: dict[tuple[int, int], float]
    total: float = field(init=False)
    metadata: dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.total = float(sum(self.entries.values()))


def _split_metadata(text: str):
    """Return (metadata dict, list of (line_no, line) for the body)."""
    meta: dict[str, str] = {}
    body: list[tuple[int, str]] = []
    lines = text.splitlines()
    in_meta = False
    meta_closed = False
    for no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("~"):
            continue
        if line.startswith("<"):
            close = line.find(">")
            if close < 0:
                raise ParseError(f"line {no}: unterminated metadata tag")
            key = line[1:close].strip()
            value = line[close + 1:].strip()
            if key.upper() == "END OF METADATA":
                meta_closed = True
                continue
            if meta_closed:
                raise ParseError(f"line {no}: metadata after <END OF METADATA>")
            in_meta = True
            meta[key.upper()] = value
            continue
        if in_meta and not meta_closed:
            raise ParseError(
                f"line {no}: data row before <END OF METADATA>")
        body.append((no, line))
    return meta, body


def parse_network(text: str) -> Network:
    """Parse TNTP net format: metadata, optional ``~`` header, then one
    edge row per line with at least 10 whitespace-separated fields
    (from, to, capacity, length, free-flow time, B, power, speed, toll,
    type) terminated by ``;``."""
    meta, body = _split_metadata(text)
    edges: list[Edge] = []
    max_node = 0
    for no, line in body:
        tokens = line.split()
        if tokens[-1] == ";":
            tokens = tokens[:-1]
        elif tokens[-1].endswith(";"):
            tokens[-1] = tokens[-1][:-1]
        else:
            raise ParseError(f"line {no}: edge row not terminated by ';'")
        if len(tokens) < 10:
            raise ParseError(
                f"line {no}: expected >= 10 fields, got {len(tokens)}")
        try:
            vals = [float(tok) for tok in tokens[:10]]
        except ValueError as err:
            raise ParseError(f"line {no}: non-numeric field ({err})") from None
        src, dst = int(vals[0]), int(vals[1])
        cap, length, fft, b, p, speed, toll, ltype = vals[2:10]
        if src < 1 or dst < 1:
            raise ValidationError(f"line {no}: node ids must be >= 1")
        if src == dst:
            raise ValidationError(f"line {no}: self-loop {src}->{dst}")
        if cap <= 0:
            raise ValidationError(f"line {no}: capacity {cap} must be > 0")
        if fft < 0 or b < 0 or p < 0:
            raise ValidationError(
                f"line {no}: free-flow time, B and power must be >= 0")
        edges.append(Edge(len(edges), src, dst, cap, length, fft, b, p,
                          speed, toll, ltype))
        max_node = max(max_node, src, dst)
    meta_nodes = int(float(meta.get("NUMBER OF NODES", 0)))
    return Network(max(max_node, meta_nodes), edges, meta)


def parse_trips(text: str) -> DemandTable:
    """Parse TNTP trips format: metadata, then ``Origin <o>`` blocks of
    ``dest : flow;`` entries. Zero-flow entries are dropped; a total
    differing from the ``<TOTAL OD FLOW>`` metadata only warns."""
    meta, body = _split_metadata(text)
    entries: dict[tuple[int, int], float] = {}
    origin: int | None = None
    for no, line in body:
        if line.lower().startswith("origin"):
            parts = line.split()
            if len(parts) < 2:
                raise ParseError(f"line {no}: Origin without node id")
            try:
                origin = int(float(parts[1]))
            except ValueError:
                raise ParseError(
                    f"line {no}: Origin id {parts[1]!r} not numeric") from None
            continue
        for chunk in line.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            if origin is None:
                raise ParseError(f"line {no}: demand entry before any Origin")
            if ":" not in chunk:
                raise ParseError(f"line {no}: expected 'dest : flow'")
            dest_s, flow_s = chunk.split(":", 1)
            try:
                dest = int(float(dest_s))
                flow = float(flow_s)
            except ValueError as err:
                raise ParseError(f"line {no}: non-numeric entry ({err})") from None
            if flow < 0:
                raise ValidationError(f"line {no}: negative demand {flow}")
            if flow == 0:
                continue
            if dest == origin:
                raise ValidationError(
                    f"line {no}: nonzero self-demand at node {origin}")
            entries[(origin, dest)] = entries.get((origin, dest), 0.0) + flow
    table = DemandTable(entries, meta)
    stated = meta.get("TOTAL OD FLOW")
    if stated is not None:
        stated_val = float(stated)
        if abs(table.total - stated_val) > 1e-6 * max(1.0, abs(stated_val)):
            warnings.warn(
                f"trips total {table.total} differs from metadata "
                f"{stated_val}; using the actual sum", stacklevel=2)
    return table


def network_to_tntp(net: Network) -> str:
    lines = [
        f"<NUMBER OF ZONES> {net.metadata.get('NUMBER OF ZONES', net.node_count)}",
        f"<NUMBER OF NODES> {net.node_count}",
        "<FIRST THRU NODE> 1",
        f"<NUMBER OF LINKS> {len(net.edges)}",
        "<END OF METADATA>",
        "",
        "~ Init node Term node Capacity Length Free Flow Time B Power "
        "Speed limit Toll Type ;",
    ]
    for e in net.edges:
        lines.append(
            f"{e.src} {e.dst} {e.capacity!r} {e.length!r} {e.free_flow!r} "
            f"{e.b_coeff!r} {e.power!r} {e.speed!r} {e.toll!r} "
            f"{e.link_type!r} ;")
    return "\n".join(lines) + "\n"


def demand_to_tntp(table: DemandTable) -> str:
    zones = table.metadata.get(
        "NUMBER OF ZONES",
        max((max(o, d) for o, d in table.entries), default=0))
    lines = [
        f"<NUMBER OF ZONES> {zones}",
        f"<TOTAL OD FLOW> {table.total!r}",
        "<END OF METADATA>",
        "",
    ]
    by_origin: dict[int, list[tuple[int, float]]] = {}
    for (o, d), flow in table.entries.items():
        by_origin.setdefault(o, []).append((d, flow))
    for o in sorted(by_origin):
        lines.append(f"Origin {o}")
        for d, flow in sorted(by_origin[o]):
            lines.append(f"{d} : {flow!r};")
        lines.append("")
    return "\n".join(lines) + "\n"


# Tolerances for calling two route costs "tied": relative plus a small
# absolute slack so exact-zero distances still admit ties.
TIE_TOL = 1e-9
TIE_TOL_ABS = 1e-12


def dijkstra(net: Network, weights: np.ndarray, source: int,
             reverse: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Single-source shortest distances over nonnegative edge weights.

    Returns (dist, finalization_order); unreached nodes keep dist=inf and
    order=-1. With reverse=True edges are traversed backwards (distances
    TO `source`). The heap is keyed by (dist, node id), so the
    finalization order is deterministic and breaks distance plateaus by
    node id as seen from the source.
    """
    adj = net._in if reverse else net._out
    dist = np.full(net.node_count + 1, np.inf)
    order = np.full(net.node_count + 1, -1, dtype=np.int64)
    dist[source] = 0.0
    heap = [(0.0, source)]
    counter = 0
    while heap:
        d, u = heapq.heappop(heap)
        if order[u] >= 0:
            continue
        order[u] = counter
        counter += 1
        for v, eid in adj[u]:
            nd = d + weights[eid]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist, order


def _tight_split(net: Network, weights: np.ndarray,
                 dist_f: np.ndarray, order_f: np.ndarray,
                 dist_b: np.ndarray, origin: int, dest: int,
                 tie_tol: float, tie_tol_abs: float):
    """Tight-edge selection and equal-split path counting.

    An edge (u,v) is tight when it lies on some minimum-weight origin->dest
    route within tolerance. Zero-weight cycles are broken by keeping only
    edges that advance the origin's Dijkstra finalization order, which
    preserves connectivity (shortest-tree edges always advance it).
    Returns (tight edge ids, per-edge demand share, count_from, count_to,
    total path count).
    """
    best = dist_f[dest]
    if not np.isfinite(best):
        raise NoPathError(f"destination {dest} unreachable from {origin}")
    du = dist_f[net.srcs]
    dv = dist_f[net.dsts]
    bv = dist_b[net.dsts]
    local = du + weights <= dv * (1.0 + tie_tol) + tie_tol_abs
    through = du + weights + bv <= best * (1.0 + tie_tol) + tie_tol_abs
    forwardness = order_f[net.srcs] < order_f[net.dsts]
    reached = order_f[net.srcs] >= 0
    kept = np.flatnonzero(local & through & forwardness & reached)

    count_from = np.zeros(net.node_count + 1)
    count_to = np.zeros(net.node_count + 1)
    count_from[origin] = 1.0
    count_to[dest] = 1.0
    by_src_order = kept[np.argsort(order_f[net.srcs[kept]], kind="stable")]
    for eid in by_src_order:
        count_from[net.dsts[eid]] += count_from[net.srcs[eid]]
    for eid in by_src_order[::-1]:
        count_to[net.srcs[eid]] += count_to[net.dsts[eid]]
    total = count_from[dest]
    if total <= 0:
        raise NoPathError(
            f"no acyclic tight path {origin}->{dest} (internal)")

    shares = np.zeros(net.edge_count)
    shares[kept] = (count_from[net.srcs[kept]] *
                    count_to[net.dsts[kept]]) / total
    tight = [int(e) for e in kept if shares[e] > 0.0]
    return tight, shares, count_from, count_to, float(total)


@dataclass
class TightDag:
    """Shortest-route bundle for one (origin, dest) pair under one weight
    vector: distances, the surviving tight edges, and path counts that
    realize an exact equal split over every counted route."""
    origin: int
    dest: int
    dist: np.ndarray
    tight_edges: list[int]
    path_count_from: np.ndarray
    path_count_to: np.ndarray
    total_paths: float
    shares: np.ndarray = field(repr=False)

    def edge_share(self, edge_id: int) -> float:
        """Fraction of the pair's demand crossing the given edge."""
        return float(self.shares[edge_id])


def shortest_path_dag(net: Network, weights: np.ndarray, origin: int,
                      dest: int, tie_tol: float = TIE_TOL,
                      tie_tol_abs: float = TIE_TOL_ABS) -> TightDag:
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (net.edge_count,):
        raise ValidationError(
            f"expected {net.edge_count} weights, got {weights.shape}")
    if np.any(weights < 0):
        raise ValidationError("edge weights must be nonnegative")
    dist_f, order_f = dijkstra(net, weights, origin)
    dist_b, _ = dijkstra(net, weights, dest, reverse=True)
    tight, shares, cf, ct, total = _tight_split(
        net, weights, dist_f, order_f, dist_b, origin, dest,
        tie_tol, tie_tol_abs)
    return TightDag(origin, dest, dist_f, tight, cf, ct, total, shares)
