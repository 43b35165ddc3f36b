"""IP-hop graph construction and AS-level path reconstruction."""

from collections import Counter
from dataclasses import dataclass

from .exceptions import ParseError
from .validation import read_text


class PathGraph:
    """Directed graph of observed hops; every edge has unit weight.

    ``endpoints`` records which nodes are overlay hosts rather than routers.
    Path searches never transit through an endpoint other than the requested
    source and destination.
    """

    def __init__(self, edges=(), nodes=(), endpoints=()):
        succ = {}
        pred = {}
        for n in nodes:
            succ.setdefault(n, set())
            pred.setdefault(n, set())
        for u, v in edges:
            if u == v:
                continue
            succ.setdefault(u, set()).add(v)
            succ.setdefault(v, set())
            pred.setdefault(v, set()).add(u)
            pred.setdefault(u, set())
        self._succ = {n: frozenset(s) for n, s in succ.items()}
        self._pred = {n: frozenset(s) for n, s in pred.items()}
        self.endpoints = frozenset(e for e in endpoints if e in self._succ)

    @property
    def nodes(self):
        return frozenset(self._succ)

    @property
    def edges(self):
        return frozenset((u, v) for u, vs in self._succ.items() for v in vs)

    def __contains__(self, node):
        return node in self._succ

    def __len__(self):
        return len(self._succ)

    def __eq__(self, other):
        if not isinstance(other, PathGraph):
            return NotImplemented
        return self._succ == other._succ and self.endpoints == other.endpoints

    __hash__ = None

    def __repr__(self):
        return f"PathGraph({len(self._succ)} nodes, {self.number_of_edges()} edges)"

    def number_of_edges(self):
        return sum(len(s) for s in self._succ.values())

    def successors(self, node):
        return self._succ[node]

    def predecessors(self, node):
        return self._pred[node]

    def adjacency(self):
        """Mutable copy of the successor sets, for destructive algorithms."""
        return {n: set(s) for n, s in self._succ.items()}

    def to_edgelist(self):
        """``u v`` per line, sorted lexicographically."""
        return "".join(f"{u} {v}\n" for u, v in sorted(self.edges))


def read_edgelist(source, endpoints=()):
    edges = []
    for lineno, raw in enumerate(read_text(source).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected 'u v'", lineno)
        edges.append(tuple(parts))
    return PathGraph(edges, endpoints=endpoints)


def record_edges(record):
    """Edges contributed by one traceroute, skipping those touching an unresponsive hop."""
    chain = [record.src, *record.addresses, record.dst]
    for u, v in zip(chain, chain[1:]):
        if u is not None and v is not None and u != v:
            yield (u, v)


def build_ip_graph(records):
    edges = set()
    hosts = set()
    for r in records:
        hosts.add(r.src)
        hosts.add(r.dst)
        edges.update(record_edges(r))
    return PathGraph(edges, nodes=hosts, endpoints=hosts)


@dataclass(frozen=True)
class IpPath:
    endpoints: tuple[str, str]
    hops: tuple

    def __post_init__(self):
        object.__setattr__(self, "endpoints", tuple(self.endpoints))
        object.__setattr__(self, "hops", _dedupe_consecutive(self.hops))

    @classmethod
    def from_record(cls, record):
        return cls(record.pair, record.addresses)


def _dedupe_consecutive(hops):
    out = []
    for h in hops:
        if h is not None and out and out[-1] == h:
            continue
        out.append(h)
    return tuple(out)


@dataclass(frozen=True)
class AsPath:
    endpoints: tuple[str, str]
    asns: tuple[int, ...]

    def __len__(self):
        return len(self.asns)


class HopAsnMap:
    """ASN lookup built from the ASNs carried inside traceroute hops.

    Stands in for a :class:`PrefixTable` when traceroutes already report the
    AS of each hop. The first non-unknown ASN seen for an address wins.
    """

    def __init__(self, records):
        self._map = {}
        for r in records:
            for h in r.hops:
                if h.address is not None and h.asn is not None:
                    self._map.setdefault(h.address, h.asn)

    def lookup(self, ip):
        return self._map.get(ip)

    def __len__(self):
        return len(self._map)


def compress_asns(asns):
    """Collapse a per-hop ASN list into an AS path.

    Unknown entries (None) are removed before collapsing runs. This bridges
    an unknown run flanked by the same AS and drops one sitting between two
    different ASes or at either end.
    """
    out = []
    for a in asns:
        if a is None:
            continue
        if not out or out[-1] != a:
            out.append(a)
    return tuple(out)


def compress_to_as_path(path, table):
    """Map each hop of ``path`` through ``table`` (anything with ``lookup``) and compress."""
    return AsPath(path.endpoints, compress_asns(table.lookup(h) if h is not None else None for h in path.hops))


def record_as_path(record, table=None):
    """AS path of a record, via ``table`` or the record's own hop ASNs when ``table`` is None."""
    if table is None:
        return AsPath(record.pair, compress_asns(h.asn for h in record.hops))
    return compress_to_as_path(IpPath.from_record(record), table)


def latest_records(records):
    """Latest record per (src, dst) pair; later file position wins timestamp ties."""
    latest = {}
    for r in records:
        cur = latest.get(r.pair)
        if cur is None or r.timestamp >= cur.timestamp:
            latest[r.pair] = r
    return latest


@dataclass(frozen=True)
class PairLength:
    ip_hop_count: int
    as_hop_count: int

    @property
    def hops_per_as(self):
        if self.as_hop_count == 0:
            return None
        return self.ip_hop_count / self.as_hop_count


@dataclass(frozen=True)
class PathLengthStats:
    per_pair: dict
    ip_histogram: dict
    as_histogram: dict

    @property
    def mean_hops_per_as(self):
        ratios = [p.hops_per_as for p in self.per_pair.values() if p.hops_per_as is not None]
        if not ratios:
            return None
        return sum(ratios) / len(ratios)


def path_length_stats(records, table=None):
    """IP and AS hop counts of each pair's latest path, plus histograms of both."""
    per_pair = {}
    for pair, r in sorted(latest_records(records).items()):
        ip_count = len(IpPath.from_record(r).hops) + 1
        per_pair[pair] = PairLength(ip_count, len(record_as_path(r, table)))
    ip_hist = Counter(p.ip_hop_count for p in per_pair.values())
    as_hist = Counter(p.as_hop_count for p in per_pair.values())
    return PathLengthStats(per_pair, dict(sorted(ip_hist.items())), dict(sorted(as_hist.items())))


def as_node(asn):
    return f"AS{asn}"


def build_as_graph(records, table=None):
    """Contract traceroutes to a directed AS graph with hosts as endpoint nodes."""
    edges = set()
    hosts = set()
    for r in records:
        hosts.add(r.src)
        hosts.add(r.dst)
        chain = [r.src, *(as_node(a) for a in record_as_path(r, table).asns), r.dst]
        edges.update(zip(chain, chain[1:]))
    return PathGraph(edges, nodes=hosts, endpoints=hosts)


def as_adjacencies(records, table=None):
    """Undirected AS adjacencies ``(a, b)`` with ``a < b`` seen on any observed path."""
    adj = set()
    for r in records:
        asns = record_as_path(r, table).asns
        for a, b in zip(asns, asns[1:]):
            adj.add((min(a, b), max(a, b)))
    return adj
