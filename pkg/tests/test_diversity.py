import itertools
import random

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rec
from overlay_scout.diversity import (
    BORDER,
    border_disjoint,
    border_routers,
    degree_distribution,
    degree_distribution_from_degrees,
    divergence_hop,
    divergence_results,
    greedy_edge_disjoint,
    max_flow_disjoint_count,
    one_hop_path,
)
from overlay_scout.exceptions import NoPathError, UnknownAsnError, ValidationError
from overlay_scout.graph import PathGraph, compress_asns
from overlay_scout.ingest import PrefixTable

DIAMOND = [("s", "a"), ("a", "d"), ("s", "b"), ("b", "d")]
CHAIN = [("s", "a"), ("a", "d")]
CROSSING = [
    ("s", "a"), ("a", "x"), ("x", "b"), ("b", "t"),
    ("s", "c"), ("c", "y"), ("y", "d"), ("d", "t"), ("a", "d"),
]


def _simple_paths(edges, s, d):
    adj = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
    out = []

    def walk(node, seen, path):
        if node == d:
            out.append(tuple(path))
            return
        for v in adj.get(node, ()):
            if v not in seen:
                walk(v, seen | {v}, path + [(node, v)])

    walk(s, {s}, [])
    return out


def brute_force_disjoint(edges, s, d):
    """Size of the largest set of pairwise edge-disjoint simple s->d paths."""
    paths = _simple_paths(edges, s, d)
    for k in range(len(paths), 0, -1):
        for combo in itertools.combinations(paths, k):
            used = [e for p in combo for e in p]
            if len(used) == len(set(used)):
                return k
    return 0


# divergence

def test_divergence_examples():
    assert divergence_hop("abcd", "abcd") is None
    assert divergence_hop("abcd", "abxd") == 3
    assert divergence_hop("ab", "abc") == 3
    assert divergence_hop("", "") is None


seqs = st.lists(st.sampled_from("abc"), max_size=5)


@given(seqs, seqs)
def test_divergence_symmetric_and_reflexive(p, q):
    assert divergence_hop(p, p) is None
    assert divergence_hop(p, q) == divergence_hop(q, p)
    n = divergence_hop(p, q)
    if n is not None:
        assert p[: n - 1] == q[: n - 1]


@given(st.lists(st.one_of(st.none(), st.integers(1, 3)), max_size=6))
def test_identical_ip_paths_never_diverge_at_as_level(asns):
    assert divergence_hop(compress_asns(asns), compress_asns(list(asns))) is None


def test_one_hop_path_examples():
    records = [rec("A", "R", ["1.0.0.1"]), rec("R", "B", ["2.0.0.1"])]
    path = one_hop_path("A", "R", "B", records)
    assert path.endpoints == ("A", "B")
    assert path.hops == ("1.0.0.1", "R", "2.0.0.1")
    with pytest.raises(NoPathError):
        one_hop_path("A", "R", "C", records)


def test_one_hop_path_keeps_shared_router():
    records = [rec("A", "R", ["1.0.0.1"]), rec("R", "B", ["1.0.0.1"])]
    assert one_hop_path("A", "R", "B", records).hops == ("1.0.0.1", "R", "1.0.0.1")


def test_divergence_results_ip_none_implies_as_none():
    table = PrefixTable([("1.0.0.0/8", 1), ("2.0.0.0/8", 2)])
    records = [
        rec("A", "B", ["1.0.0.1", "2.0.0.1"]),
        rec("A", "R", ["1.0.0.1"]),
        rec("R", "B", ["2.0.0.1"]),
        rec("B", "A", ["2.0.0.1", "1.0.0.1"]),
        rec("B", "R", ["2.0.0.1"]),
        rec("R", "A", ["1.0.0.1"]),
    ]
    results = {(r.pair, r.relay): r for r in divergence_results(records, table)}
    r = results[(("A", "B"), "R")]
    assert r.ip_divergence_hop == 2
    # R is unmapped, so the AS sequences are both (1, 2).
    assert r.as_divergence_hop is None
    for r in results.values():
        if r.ip_divergence_hop is None:
            assert r.as_divergence_hop is None


# disjoint paths

@pytest.mark.parametrize(
    "edges, s, d, greedy, flow",
    [(DIAMOND, "s", "d", 2, 2), (CHAIN, "s", "d", 1, 1), (CROSSING, "s", "t", 1, 2)],
)
def test_disjoint_examples(edges, s, d, greedy, flow):
    g = PathGraph(edges)
    assert brute_force_disjoint(edges, s, d) == flow
    assert greedy_edge_disjoint(g, s, d).count == greedy
    assert max_flow_disjoint_count(g, s, d) == flow


def test_crossing_greedy_takes_the_short_path():
    report = greedy_edge_disjoint(PathGraph(CROSSING), "s", "t")
    assert report.paths == (("s", "a", "d", "t"),)


def test_tie_break_is_lexicographic():
    report = greedy_edge_disjoint(PathGraph([("s", "b"), ("b", "d"), ("s", "a"), ("a", "d")]), "s", "d")
    assert report.paths == (("s", "a", "d"), ("s", "b", "d"))


def test_missing_terminal_raises():
    with pytest.raises(NoPathError):
        greedy_edge_disjoint(PathGraph(CHAIN), "s", "zz")
    with pytest.raises(NoPathError):
        max_flow_disjoint_count(PathGraph(CHAIN), "zz", "d")
    with pytest.raises(ValidationError):
        greedy_edge_disjoint(PathGraph(CHAIN), "s", "s")


def test_other_hosts_are_not_transit():
    g = PathGraph([("s", "h"), ("h", "d"), ("s", "r"), ("r", "d")], endpoints={"s", "d", "h"})
    assert greedy_edge_disjoint(g, "s", "d").paths == (("s", "r", "d"),)
    assert max_flow_disjoint_count(g, "s", "d") == 1


def _random_graph(rng, n, p=0.3):
    return [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]


@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_greedy_bounded_by_max_flow(seed, n):
    rng = random.Random(seed)
    edges = [(str(u), str(v)) for u, v in _random_graph(rng, n)]
    g = PathGraph(edges, nodes=[str(i) for i in range(n)])
    report = greedy_edge_disjoint(g, "0", str(n - 1))
    used = [e for p in report.paths for e in zip(p, p[1:])]
    assert len(used) == len(set(used))
    assert all(p[0] == "0" and p[-1] == str(n - 1) for p in report.paths)
    assert set(used) <= set(edges)
    flow = max_flow_disjoint_count(g, "0", str(n - 1))
    assert report.count <= flow
    if n <= 6:
        assert flow == brute_force_disjoint(edges, "0", str(n - 1))


def test_max_flow_matches_networkx():
    rng = random.Random(11)
    for _ in range(50):
        n = rng.randint(2, 12)
        edges = _random_graph(rng, n)
        g = PathGraph(edges, nodes=range(n))
        ng = nx.DiGraph(edges)
        ng.add_nodes_from(range(n))
        assert max_flow_disjoint_count(g, 0, n - 1) == nx.edge_connectivity(ng, 0, n - 1)


# border routers

TABLE = PrefixTable([("10.1.0.0/16", 100), ("10.2.0.0/16", 200), ("10.3.0.0/16", 300)])
X, Y, Z, W = "10.1.0.1", "10.1.0.2", "10.2.0.1", "10.2.0.2"


def test_border_examples():
    g = PathGraph([("A", X), (X, Y), (Y, Z), (Z, "B")], endpoints={"A", "B"})
    assert border_routers(g, "A", TABLE) == {Y}
    assert border_routers(g, "B", TABLE, "ingress") == {Z}
    g2 = PathGraph([("A", X), (X, Y)], endpoints={"A"})
    assert border_routers(g2, "A", TABLE) == frozenset()
    g3 = PathGraph([("A", X), (X, Y), (X, Z), (Y, W)], endpoints={"A"})
    assert border_routers(g3, "A", TABLE) == {X, Y}


def test_border_unknown_asn():
    g = PathGraph([("A", "192.0.2.1")], endpoints={"A"})
    with pytest.raises(UnknownAsnError):
        border_routers(g, "A", TABLE)


def test_border_disjoint_examples():
    one = PathGraph([("A", X), (X, Z), (Z, "B")], endpoints={"A", "B"})
    report = border_disjoint(one, "A", "B", TABLE)
    assert (report.mode, report.count, report.paths) == (BORDER, 1, ((X, Z),))

    # Two egress borders, each with its own route into one ingress border.
    m1, m2 = "10.3.0.1", "10.3.0.2"
    edges = [("A", X), ("A", Y), (X, m1), (Y, m2), (m1, Z), (m2, Z), (Z, "B")]
    two = PathGraph(edges, endpoints={"A", "B"})
    # Oracle: contract each border set into a single terminal.
    merge = {X: "S*", Y: "S*", Z: "T*"}
    contracted = PathGraph((merge.get(u, u), merge.get(v, v)) for u, v in edges if "A" not in (u, v) and "B" not in (u, v))
    assert max_flow_disjoint_count(contracted, "S*", "T*") == 2
    report = border_disjoint(two, "A", "B", TABLE)
    assert report.count == 2
    assert set(report.paths) == {(X, m1, Z), (Y, m2, Z)}

    cut = PathGraph([("A", X), (X, m1), ("10.3.0.9", Z), (Z, "B")], endpoints={"A", "B"})
    assert border_disjoint(cut, "A", "B", TABLE).count == 0


# degree distribution

def test_degree_fit_recovers_exponent():
    degrees = {asn: max(1, round(1000 * asn ** -0.8)) for asn in range(1, 101)}
    dist = degree_distribution_from_degrees(degrees)
    assert abs(dist.fitted_R - -0.8) <= 0.05


def test_star_graph_degrees():
    dist = degree_distribution({(1, i) for i in range(2, 7)})
    assert list(dist.degrees) == [5, 1, 1, 1, 1, 1]
    assert dist.entries[0] == (1, 5)
    assert list(dist.ranks) == [1, 2, 3, 4, 5, 6]


def test_empty_edges_no_fit():
    dist = degree_distribution(set())
    assert len(dist) == 0 and dist.fitted_R is None


@given(st.sets(st.tuples(st.integers(1, 15), st.integers(1, 15)), max_size=40))
def test_degrees_non_increasing(edges):
    dist = degree_distribution(edges)
    d = list(dist.degrees)
    assert d == sorted(d, reverse=True)
    assert sum(d) == 2 * len({(min(a, b), max(a, b)) for a, b in edges if a != b})
