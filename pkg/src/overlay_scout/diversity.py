"""Path diversity measures: divergence hops, edge-disjoint paths, AS degree laws."""

from collections import Counter, deque
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .exceptions import NoPathError, UnknownAsnError, ValidationError
from .graph import IpPath, PathGraph, compress_to_as_path, latest_records

IP = "ip"
AS = "as"
PLAIN = "plain"
BORDER = "border"

_SUPER_SOURCE = "\x00source"
_SUPER_SINK = "\x00sink"


def divergence_hop(direct, indirect):
    """1-based position of the first differing hop, or None if the sequences are identical.

    A strict prefix diverges at ``len(shorter) + 1``.
    """
    direct = tuple(direct)
    indirect = tuple(indirect)
    for i, (a, b) in enumerate(zip(direct, indirect), start=1):
        if a != b:
            return i
    if len(direct) == len(indirect):
        return None
    return min(len(direct), len(indirect)) + 1


def _latest(records):
    if isinstance(records, Mapping):
        return records
    return latest_records(records)


def one_hop_path(src, relay, dst, records):
    """Overlay path ``src -> relay -> dst`` built from the latest measured legs.

    ``records`` is a list of traceroutes or a ``{(src, dst): record}`` mapping
    of latest records. Routers shared by both legs are kept twice.
    """
    latest = _latest(records)
    first = latest.get((src, relay))
    second = latest.get((relay, dst))
    if first is None or second is None:
        missing = f"{src}->{relay}" if first is None else f"{relay}->{dst}"
        raise NoPathError(f"no traceroute for leg {missing}")
    return IpPath((src, dst), (*first.addresses, relay, *second.addresses))


@dataclass(frozen=True)
class DivergenceResult:
    pair: tuple[str, str]
    relay: str
    ip_divergence_hop: int | None
    as_divergence_hop: int | None


def divergence_results(records, table, hosts=None):
    """Divergence of every measurable one-hop path from its direct path, at IP and AS level.

    ``table`` is anything with a ``lookup(ip)`` method (a PrefixTable or a
    HopAsnMap). Results are ordered by (src, dst, relay).
    """
    latest = _latest(records)
    if hosts is None:
        hosts = sorted({h for pair in latest for h in pair})
    out = []
    for (src, dst) in sorted(latest):
        direct = IpPath.from_record(latest[(src, dst)])
        direct_as = compress_to_as_path(direct, table).asns
        for relay in hosts:
            if relay in (src, dst) or (src, relay) not in latest or (relay, dst) not in latest:
                continue
            indirect = one_hop_path(src, relay, dst, latest)
            out.append(
                DivergenceResult(
                    (src, dst),
                    relay,
                    divergence_hop(direct.hops, indirect.hops),
                    divergence_hop(direct_as, compress_to_as_path(indirect, table).asns),
                )
            )
    return out


@dataclass(frozen=True)
class DisjointReport:
    pair: tuple
    level: str
    mode: str
    paths: tuple

    @property
    def count(self):
        return len(self.paths)


def _check_terminals(graph, s, d):
    for node in (s, d):
        if node not in graph:
            raise NoPathError(f"{node!r} is not a node of the graph")
    if s == d:
        raise ValidationError("source and destination must differ")


def _reverse_distances(radj, d, blocked):
    dist = {d: 0}
    queue = deque([d])
    while queue:
        v = queue.popleft()
        for u in radj.get(v, ()):
            if u in dist or u in blocked:
                continue
            dist[u] = dist[v] + 1
            queue.append(u)
    return dist


def _lexicographic_shortest_path(adj, radj, s, d, blocked):
    """Fewest-hop path, ties broken by the lexicographically smallest node sequence."""
    dist = _reverse_distances(radj, d, blocked)
    if s not in dist:
        return None
    path = [s]
    u = s
    while u != d:
        want = dist[u] - 1
        u = min(v for v in adj[u] if dist.get(v) == want)
        path.append(u)
    return path


def _greedy(graph, s, d, blocked):
    adj = graph.adjacency()
    radj = {n: set(graph.predecessors(n)) for n in adj}
    paths = []
    while True:
        path = _lexicographic_shortest_path(adj, radj, s, d, blocked)
        if path is None:
            return paths
        for u, v in zip(path, path[1:]):
            adj[u].discard(v)
            radj[v].discard(u)
        paths.append(tuple(path))


def greedy_edge_disjoint(graph, s, d, level=IP):
    """Repeatedly take a shortest s->d path and delete its edges until none is left.

    Other overlay hosts (``graph.endpoints``) are never used as transit nodes.
    """
    _check_terminals(graph, s, d)
    blocked = graph.endpoints - {s, d}
    return DisjointReport((s, d), level, PLAIN, tuple(_greedy(graph, s, d, blocked)))


def max_flow_disjoint_count(graph, s, d):
    """Maximum number of edge-disjoint s->d paths (unit-capacity Edmonds-Karp).

    Applies the same transit restriction as :func:`greedy_edge_disjoint`.
    """
    _check_terminals(graph, s, d)
    blocked = graph.endpoints - {s, d}
    residual = {}
    for u, v in graph.edges:
        if u in blocked or v in blocked:
            continue
        residual.setdefault(u, {})
        residual.setdefault(v, {})
        residual[u][v] = residual[u].get(v, 0) + 1
        residual[v].setdefault(u, 0)
    if s not in residual or d not in residual:
        return 0
    flow = 0
    while True:
        parent = {s: None}
        queue = deque([s])
        while queue and d not in parent:
            u = queue.popleft()
            for v, cap in residual[u].items():
                if cap > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if d not in parent:
            return flow
        v = d
        while parent[v] is not None:
            u = parent[v]
            residual[u][v] -= 1
            residual[v][u] += 1
            v = u
        flow += 1


def host_asn(graph, host, table, role="egress"):
    """AS of an overlay host, inferred from the routers adjacent to it.

    ``role="egress"`` looks at first-hop routers (host as source),
    ``"ingress"`` at last-hop routers (host as destination). The most common
    ASN wins; ties go to the smaller ASN.
    """
    if host not in graph:
        raise NoPathError(f"{host!r} is not a node of the graph")
    neighbours = graph.successors(host) if role == "egress" else graph.predecessors(host)
    counts = Counter(a for a in (table.lookup(n) for n in neighbours) if a is not None)
    if not counts:
        raise UnknownAsnError(f"cannot determine the AS of host {host!r}")
    return min(counts, key=lambda a: (-counts[a], a))


def border_routers(graph, host, table, role="egress"):
    """Border routers of ``host``'s AS.

    Egress borders have an edge to a router of another known AS; ingress
    borders have an edge from one.
    """
    asn = host_asn(graph, host, table, role)
    mapped = {n: table.lookup(n) for n in graph.nodes}
    out = set()
    for n, a in mapped.items():
        if a != asn:
            continue
        others = graph.successors(n) if role == "egress" else graph.predecessors(n)
        if any(mapped[m] is not None and mapped[m] != asn for m in others):
            out.add(n)
    return frozenset(out)


def border_disjoint(graph, src, dst, table):
    """Greedy edge-disjoint paths between the egress borders of ``src``'s AS and the ingress borders of ``dst``'s AS.

    Each border set acts as one terminal: every link leaving an egress border
    (or entering an ingress border) gets its own virtual edge to the
    super-source (super-sink), so a single border with two links can carry
    two paths. Returned paths run from an egress border to an ingress border.
    """
    egress = border_routers(graph, src, table, "egress")
    ingress = border_routers(graph, dst, table, "ingress")
    if not egress:
        raise NoPathError(f"AS of {src!r} has no egress border router")
    if not ingress:
        raise NoPathError(f"AS of {dst!r} has no ingress border router")
    blocked = graph.endpoints
    edges = set()
    out_link = {}
    in_link = {}
    for u, v in graph.edges:
        if u in blocked or v in blocked:
            continue
        # A border link is replaced, not duplicated, so its unit capacity holds.
        tail, head = u, v
        if u in egress:
            tail = f"{_SUPER_SOURCE}|{u}|{v}"
            out_link[tail] = u
            edges.add((_SUPER_SOURCE, tail))
        if v in ingress:
            head = f"{_SUPER_SINK}|{u}|{v}"
            in_link[head] = v
            edges.add((head, _SUPER_SINK))
        edges.add((tail, head))
    augmented = PathGraph(edges, nodes=(_SUPER_SOURCE, _SUPER_SINK))
    paths = []
    for p in _greedy(augmented, _SUPER_SOURCE, _SUPER_SINK, frozenset()):
        paths.append((out_link[p[1]], *p[2:-2], in_link[p[-2]]))
    return DisjointReport((src, dst), IP, BORDER, tuple(paths))


@dataclass(frozen=True)
class DegreeDistribution:
    """ASes ranked by descending degree with a fitted rank exponent.

    ``fitted_R`` is the least-squares slope of log(degree) on log(rank), or
    None when fewer than two ASes have positive degree.
    """

    entries: tuple
    fitted_R: float | None
    intercept: float | None = None

    @property
    def ranks(self):
        return np.arange(1, len(self.entries) + 1)

    @property
    def degrees(self):
        return np.array([d for _, d in self.entries], dtype=int)

    def __len__(self):
        return len(self.entries)


def fit_rank_exponent(degrees):
    """Slope and intercept of log(d) against log(rank) for descending ``degrees``."""
    d = np.asarray(degrees, dtype=float)
    d = d[d > 0]
    if d.size < 2:
        return None, None
    r = np.arange(1, d.size + 1, dtype=float)
    slope, intercept = np.polyfit(np.log(r), np.log(d), 1)
    return float(slope), float(intercept)


def degree_distribution_from_degrees(degrees):
    """Rank a ``{asn: degree}`` mapping; equal degrees are ordered by ASN."""
    entries = tuple(sorted(degrees.items(), key=lambda kv: (-kv[1], kv[0])))
    slope, intercept = fit_rank_exponent([deg for _, deg in entries])
    return DegreeDistribution(entries, slope, intercept)


def degree_distribution(as_edges):
    """Degree distribution of an undirected AS graph given as ``(a, b)`` adjacencies."""
    neighbours = {}
    for a, b in as_edges:
        if a == b:
            continue
        neighbours.setdefault(a, set()).add(b)
        neighbours.setdefault(b, set()).add(a)
    return degree_distribution_from_degrees({a: len(n) for a, n in neighbours.items()})
