"""Seeded synthetic overlays: power-law AS topology, traceroutes and delay series.

AS degrees follow ``d_r ~ r**R`` over ranks 1..n and are realised by shuffled
stub matching. Each AS owns a ring of 2-3 routers inside its own /24. A path
enters an AS at a router picked by the upstream AS and walks the ring, so
the IP graph carries more diversity than the AS graph. Delays are
``hops * base_delay_per_hop`` plus bounded uniform noise, so injected
degradations larger than the noise envelope are detectable with certainty.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError
from .ingest.delays import HEADER as DELAY_HEADER
from .ingest.prefixes import PrefixTable
from .ingest.traceroutes import HEADER as TRACEROUTE_HEADER
from .validation import check_positive


@dataclass(frozen=True)
class SynthConfig:
    n_ases: int = 50
    exponent: float = -0.8
    hosts: int = 10
    routers_per_as: tuple = (2, 3)
    epochs: int = 1440
    epoch_len: int = 60
    base_delay_per_hop: float = 5.0
    noise: float = 1.0
    anomaly_schedule: tuple = ()
    seed: int = 0
    traceroute_interval: int = 600
    start_time: int = 0

    def __post_init__(self):
        check_positive(self.n_ases, "n_ases", integer=True)
        if self.n_ases > 65536:
            raise ValidationError(f"n_ases must be at most 65536 (one /24 per AS under 10/8), got {self.n_ases}")
        check_positive(self.hosts, "hosts", integer=True)
        check_positive(self.epochs, "epochs", integer=True)
        check_positive(self.epoch_len, "epoch_len", integer=True)
        check_positive(self.traceroute_interval, "traceroute_interval", integer=True)
        check_positive(self.base_delay_per_hop, "base_delay_per_hop")
        if not self.exponent < 0:
            raise ValidationError(f"exponent must be negative, got {self.exponent!r}")
        if self.noise < 0:
            raise ValidationError(f"noise must be non-negative, got {self.noise!r}")
        lo, hi = self.routers_per_as
        check_positive(lo, "routers_per_as minimum", integer=True)
        if hi < lo:
            raise ValidationError(f"routers_per_as range {self.routers_per_as!r} is empty")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        schedule = tuple(tuple(entry) for entry in self.anomaly_schedule)
        object.__setattr__(self, "anomaly_schedule", schedule)
        object.__setattr__(self, "routers_per_as", (lo, hi))
        seen = set()
        for entry in schedule:
            if len(entry) != 4:
                raise ValidationError(f"schedule entry {entry!r} must be (epoch, src, dst, added_delay)")
            epoch, src, dst, added = entry
            if not 0 <= epoch < self.epochs:
                raise ValidationError(f"scheduled epoch {epoch} outside 0..{self.epochs - 1}")
            if not added > 0:
                raise ValidationError(f"added delay must be positive, got {added!r}")
            if (epoch, src, dst) in seen:
                raise ValidationError(f"duplicate schedule entry for epoch {epoch} {src}->{dst}")
            seen.add((epoch, src, dst))

    @property
    def host_ids(self):
        width = max(2, len(str(self.hosts - 1)))
        return tuple(f"h{i:0{width}d}" for i in range(self.hosts))


@dataclass(frozen=True)
class Topology:
    asns: tuple
    as_edges: frozenset  # undirected (a, b) with a < b
    target_degrees: dict  # asn -> degree requested before realisation
    routers: dict  # asn -> router addresses, ring order
    prefixes: dict  # asn -> CIDR text
    hosts: tuple
    host_as: dict
    host_router: dict  # host -> index of its access router in its AS ring
    metadata: dict = field(default_factory=dict)

    def prefix_table(self):
        return PrefixTable((self.prefixes[a], a) for a in self.asns)

    def neighbours(self):
        adj = {a: set() for a in self.asns}
        for a, b in self.as_edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def degrees(self):
        return {a: len(n) for a, n in self.neighbours().items()}


def _target_degrees(n, exponent):
    if n == 1:
        return [0]
    scale = n ** (-exponent)
    ranks = np.arange(1, n + 1, dtype=float)
    degrees = np.maximum(1, np.rint(scale * ranks**exponent)).astype(int)
    return list(np.minimum(degrees, n - 1))


def _realise(degrees, rng, metadata):
    """Stub matching with repair swaps; returns a set of undirected index pairs."""
    n = len(degrees)
    stubs = np.repeat(np.arange(n), degrees)
    rng.shuffle(stubs)
    edges = set()
    bad = []
    for u, v in zip(stubs[0::2].tolist(), stubs[1::2].tolist()):
        e = (min(u, v), max(u, v))
        if u == v or e in edges:
            bad.append((u, v))
        else:
            edges.add(e)
    dropped = 0
    for u, v in bad:
        for _ in range(200):
            edge_list = sorted(edges)
            x, y = edge_list[int(rng.integers(len(edge_list)))]
            if rng.integers(2):
                x, y = y, x
            e1 = (min(u, x), max(u, x))
            e2 = (min(v, y), max(v, y))
            if u != x and v != y and e1 != e2 and e1 not in edges and e2 not in edges:
                edges.discard((min(x, y), max(x, y)))
                edges.add(e1)
                edges.add(e2)
                break
        else:
            dropped += 2
    metadata["dropped_stubs"] = dropped
    return edges


def _components(n, edges):
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [-1] * n
    comps = []
    for start in range(n):
        if seen[start] >= 0:
            continue
        seen[start] = len(comps)
        comp = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if seen[v] < 0:
                    seen[v] = len(comps)
                    comp.append(v)
                    queue.append(v)
        comps.append(comp)
    return comps


def _connect(n, edges, metadata):
    """Merge components into the largest with degree-preserving double-edge swaps."""
    swaps = added = 0
    while True:
        comps = _components(n, edges)
        if len(comps) <= 1:
            break
        comps.sort(key=lambda c: (-len(c), min(c)))
        giant = set(comps[0])
        other = set(comps[1])
        inner = sorted(e for e in edges if e[0] in other)
        outer = sorted(e for e in edges if e[0] in giant)
        done = False
        for u, v in inner:
            for x, y in outer:
                e1, e2 = (min(u, x), max(u, x)), (min(v, y), max(v, y))
                if e1 in edges or e2 in edges:
                    continue
                edges.difference_update({(u, v), (x, y)})
                edges.update({e1, e2})
                if len(_components(n, edges)) < len(comps):
                    swaps += 1
                    done = True
                    break
                edges.difference_update({e1, e2})
                edges.update({(u, v), (x, y)})
            if done:
                break
        if not done:
            # isolated node or no valid swap: attach to the best connected node
            hub = max(giant, key=lambda a: (sum(1 for e in edges if a in e), -a))
            u = min(other)
            edges.add((min(u, hub), max(u, hub)))
            added += 1
    metadata["connectivity_swaps"] = swaps
    metadata["added_edges"] = added


def generate_topology(config):
    rng = np.random.default_rng([config.seed, 0])
    n = config.n_ases
    metadata = {}
    degrees = _target_degrees(n, config.exponent)
    adjustment = 0
    while sum(degrees) % 2:
        top = int(np.argmax(degrees))
        degrees[top] -= 1
        adjustment += 1
    metadata["degree_sum_adjustment"] = adjustment
    edges = _realise(degrees, rng, metadata) if n > 1 else set()
    _connect(n, edges, metadata)

    asns = tuple(range(1, n + 1))
    lo, hi = config.routers_per_as
    sizes = rng.integers(lo, hi + 1, size=n)
    routers = {}
    prefixes = {}
    for i, asn in enumerate(asns):
        net = f"10.{i >> 8}.{i & 255}"
        prefixes[asn] = f"{net}.0/24"
        routers[asn] = tuple(f"{net}.{j + 1}" for j in range(int(sizes[i])))

    realised = [0] * n
    for u, v in edges:
        realised[u] += 1
        realised[v] += 1
    tiebreak = rng.permutation(n)
    stub_order = sorted(range(n), key=lambda i: (realised[i], int(tiebreak[i])))
    hosts = config.host_ids
    host_as = {}
    host_router = {}
    for h_i, host in enumerate(hosts):
        a = asns[stub_order[h_i % n]]
        host_as[host] = a
        host_router[host] = int(rng.integers(len(routers[a])))

    return Topology(
        asns=asns,
        as_edges=frozenset((asns[u], asns[v]) for u, v in edges),
        target_degrees={asns[i]: int(d) for i, d in enumerate(degrees)},
        routers=routers,
        prefixes=prefixes,
        hosts=hosts,
        host_as=host_as,
        host_router=host_router,
        metadata=metadata,
    )


def _as_route(adj, src, dst, dist_to):
    """Shortest AS path; ties go to the lexicographically smallest ASN sequence."""
    dist = dist_to(dst)
    if src not in dist:
        raise ValidationError(f"AS {src} cannot reach AS {dst}")
    path = [src]
    while path[-1] != dst:
        u = path[-1]
        path.append(min(v for v in adj[u] if dist.get(v) == dist[u] - 1))
    return path


def _bfs(adj, root):
    dist = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def router_path(topology, src, dst, as_path):
    """Router-level hops ``[(ip, asn), ...]`` for a host pair along ``as_path``.

    Every AS ring is walked in full except the last one, which stops one
    router short, so ``hops + 1 == sum(ring sizes)``.
    """
    hops = []
    for pos, asn in enumerate(as_path):
        ring = topology.routers[asn]
        c = len(ring)
        # the ingress router depends on the upstream AS (ASNs are 1-based indices)
        start = topology.host_router[src] if pos == 0 else (as_path[pos - 1] - 1) % c
        length = max(1, c - 1) if pos == len(as_path) - 1 else c
        hops.extend((ring[(start + step) % c], asn) for step in range(length))
    return hops


@dataclass(frozen=True)
class GroundTruth:
    anomalies: tuple  # sorted (epoch, src, dst, added_delay)
    routes: dict  # (src, dst) -> ((ip, asn), ...)
    base_delay: dict  # (src, dst) -> noise-free delay
    best_relay: dict  # (src, dst) -> (relay, noise-free indirect delay) or None


@dataclass(frozen=True)
class SynthOutput:
    topology: Topology
    traceroute_file: str
    delay_file: str
    prefix_file: str
    truth_file: str
    ground_truth: GroundTruth


def generate_measurements(topology, config):
    hosts = topology.hosts
    host_set = set(hosts)
    for epoch, src, dst, _ in config.anomaly_schedule:
        for h in (src, dst):
            if h not in host_set:
                raise ValidationError(f"anomaly schedule references unknown host {h!r}")
        if src == dst:
            raise ValidationError(f"anomaly schedule entry has identical endpoints {src!r}")

    adj = topology.neighbours()
    cache = {}

    def dist_to(root):
        if root not in cache:
            cache[root] = _bfs(adj, root)
        return cache[root]

    pairs = [(a, b) for a in hosts for b in hosts if a != b]
    routes = {}
    base = {}
    for a, b in pairs:
        as_path = _as_route(adj, topology.host_as[a], topology.host_as[b], dist_to)
        hops = tuple(router_path(topology, a, b, as_path))
        routes[(a, b)] = hops
        base[(a, b)] = config.base_delay_per_hop * (len(hops) + 1)

    best = {}
    for a, b in pairs:
        options = [(base[(a, k)] + base[(k, b)], k) for k in hosts if k not in (a, b)]
        best[(a, b)] = (min(options)[1], min(options)[0]) if options else None

    rng = np.random.default_rng([config.seed, 1])
    T = config.epochs
    matrix = np.repeat(np.array([base[p] for p in pairs])[:, None], T, axis=1)
    if config.noise > 0:
        matrix += rng.uniform(-config.noise, config.noise, size=matrix.shape)
    row = {p: i for i, p in enumerate(pairs)}
    anomalies = tuple(sorted(config.anomaly_schedule))
    for epoch, src, dst, added in anomalies:
        matrix[row[(src, dst)], epoch] += added
    matrix = np.round(np.maximum(matrix, 0.0), 3)

    delay_lines = [",".join(DELAY_HEADER)]
    epochs = range(T)
    for (a, b), values in zip(pairs, matrix.tolist()):
        mid = f",{a},{b},"
        delay_lines.extend(f"{e}{mid}{v:.3f}" for e, v in zip(epochs, values))
    delay_file = "\n".join(delay_lines) + "\n"

    bodies = {}
    for p, hops in routes.items():
        lines = [f"H {ttl} {ip} {asn}" for ttl, (ip, asn) in enumerate(hops, start=1)]
        bodies[p] = f" {p[0]} {p[1]} {len(hops)}\n" + "\n".join(lines)
    step = max(1, config.traceroute_interval // config.epoch_len)
    tr_parts = [TRACEROUTE_HEADER]
    for epoch in range(0, T, step):
        stamp = f"T {config.start_time + epoch * config.epoch_len}"
        tr_parts.extend(stamp + bodies[p] for p in pairs)
    traceroute_file = "\n".join(tr_parts) + "\n"

    prefix_file = "".join(f"{topology.prefixes[a]},{a}\n" for a in topology.asns)
    truth_file = "epoch,src,dst,added_delay\n" + "".join(
        f"{e},{s},{d},{float(x)!r}\n" for e, s, d, x in anomalies
    )
    truth = GroundTruth(anomalies, routes, base, best)
    return SynthOutput(topology, traceroute_file, delay_file, prefix_file, truth_file, truth)


def generate(config):
    """Topology plus measurements in one call."""
    return generate_measurements(generate_topology(config), config)
