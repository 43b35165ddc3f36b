"""Measurement file parsing and IP-to-ASN resolution."""

from .delays import parse_delay_file, serialize_delays
from .prefixes import PrefixTable, load_prefix_table, map_ip_to_asn, serialize_prefix_table
from .records import UNKNOWN, UNRESPONSIVE, DelaySeries, Hop, TracerouteRecord
from .traceroutes import parse_traceroute_file, serialize_traceroutes
from .whois import bulk_resolve

__all__ = [
    "UNKNOWN",
    "UNRESPONSIVE",
    "DelaySeries",
    "Hop",
    "PrefixTable",
    "TracerouteRecord",
    "bulk_resolve",
    "load_prefix_table",
    "map_ip_to_asn",
    "parse_delay_file",
    "parse_traceroute_file",
    "serialize_delays",
    "serialize_prefix_table",
    "serialize_traceroutes",
]
