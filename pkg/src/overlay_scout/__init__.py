"""Overlay path diversity and relay selection from traceroutes and delay logs."""

__version__ = "0.1.0"

from .anomaly import (
    AnomalyConfig,
    AnomalyEvent,
    RelayRanking,
    TopSetStats,
    best_alternate_summary,
    delay_gain,
    detect_anomalies,
    rank_relays,
    rolling_stats,
    top_set_frequencies,
)
from .diversity import (
    DegreeDistribution,
    DisjointReport,
    DivergenceResult,
    border_disjoint,
    border_routers,
    degree_distribution,
    divergence_hop,
    greedy_edge_disjoint,
    max_flow_disjoint_count,
    one_hop_path,
)
from .estimators import KSigmaDetector, RankDegreeRegressor, RelaySelector
from .graph import AsPath, IpPath, PathGraph, build_ip_graph, compress_to_as_path, path_length_stats
from .ingest import (
    DelaySeries,
    Hop,
    PrefixTable,
    TracerouteRecord,
    bulk_resolve,
    load_prefix_table,
    map_ip_to_asn,
    parse_delay_file,
    parse_traceroute_file,
)
from .synth import SynthConfig, generate, generate_measurements, generate_topology

__all__ = [
    "AnomalyConfig",
    "AnomalyEvent",
    "AsPath",
    "best_alternate_summary",
    "border_disjoint",
    "border_routers",
    "build_ip_graph",
    "bulk_resolve",
    "compress_to_as_path",
    "degree_distribution",
    "DegreeDistribution",
    "delay_gain",
    "DelaySeries",
    "detect_anomalies",
    "DisjointReport",
    "divergence_hop",
    "DivergenceResult",
    "generate",
    "generate_measurements",
    "generate_topology",
    "greedy_edge_disjoint",
    "Hop",
    "IpPath",
    "KSigmaDetector",
    "load_prefix_table",
    "map_ip_to_asn",
    "max_flow_disjoint_count",
    "one_hop_path",
    "parse_delay_file",
    "parse_traceroute_file",
    "path_length_stats",
    "PathGraph",
    "PrefixTable",
    "rank_relays",
    "RankDegreeRegressor",
    "RelayRanking",
    "RelaySelector",
    "rolling_stats",
    "SynthConfig",
    "top_set_frequencies",
    "TopSetStats",
    "TracerouteRecord",
]
