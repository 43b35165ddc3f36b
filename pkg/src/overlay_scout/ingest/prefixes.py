"""CIDR prefix to ASN table with longest-prefix-match lookup."""

import ipaddress

from ..exceptions import ParseError, ValidationError
from ..validation import read_text


class PrefixTable:
    """Immutable IPv4 prefix -> ASN mapping.

    Lookup walks the populated prefix lengths from longest to shortest and
    probes a hash table per length, so it costs at most 33 dict lookups.
    """

    def __init__(self, entries=()):
        by_len = {}
        ordered = []
        for cidr, asn in entries:
            net = cidr if isinstance(cidr, ipaddress.IPv4Network) else _network(cidr)
            if isinstance(asn, bool) or not isinstance(asn, int) or asn <= 0:
                raise ValidationError(f"ASN must be a positive integer, got {asn!r}")
            bucket = by_len.setdefault(net.prefixlen, {})
            key = int(net.network_address)
            if key in bucket:
                raise ValidationError(f"duplicate prefix {net}")
            bucket[key] = asn
            ordered.append((net, asn))
        self._entries = tuple(ordered)
        self._lengths = sorted(by_len, reverse=True)
        self._masks = {n: (0xFFFFFFFF << (32 - n)) & 0xFFFFFFFF for n in self._lengths}
        self._by_len = by_len

    @property
    def entries(self):
        return self._entries

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __eq__(self, other):
        if not isinstance(other, PrefixTable):
            return NotImplemented
        return self._entries == other._entries

    __hash__ = None

    def __repr__(self):
        return f"PrefixTable({len(self)} entries)"

    def lookup(self, ip):
        """ASN of the longest prefix covering ``ip``; None if nothing matches or ``ip`` is not IPv4."""
        if isinstance(ip, ipaddress.IPv4Address):
            value = int(ip)
        else:
            try:
                value = int(ipaddress.IPv4Address(ip))
            except (ValueError, TypeError):
                return None
        for n in self._lengths:
            asn = self._by_len[n].get(value & self._masks[n])
            if asn is not None:
                return asn
        return None


def _network(text, lineno=None):
    try:
        return ipaddress.IPv4Network(text, strict=True)
    except ValueError as exc:
        raise ParseError(f"invalid CIDR {text!r}: {exc}", lineno) from None


def load_prefix_table(source):
    """Read ``<a.b.c.d>/<len>,<asn>`` lines (``#`` comments allowed)."""
    text = read_text(source)
    entries = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cidr, sep, asn_txt = line.partition(",")
        if not sep:
            raise ParseError("expected '<cidr>,<asn>'", lineno)
        cidr = cidr.strip()
        if "/" not in cidr:
            raise ParseError(f"CIDR {cidr!r} lacks a prefix length", lineno)
        net = _network(cidr, lineno)
        try:
            asn = int(asn_txt.strip())
        except ValueError:
            raise ParseError(f"ASN {asn_txt.strip()!r} is not an integer", lineno) from None
        if asn <= 0:
            raise ParseError(f"ASN must be positive, got {asn}", lineno)
        if net in seen:
            raise ValidationError(f"duplicate prefix {net}", lineno)
        seen.add(net)
        entries.append((net, asn))
    return PrefixTable(entries)


def serialize_prefix_table(table):
    return "".join(f"{net},{asn}\n" for net, asn in table.entries)


def map_ip_to_asn(table, ip):
    """Longest-prefix-match ``ip`` in ``table``; None stands for UNKNOWN."""
    return table.lookup(ip)
