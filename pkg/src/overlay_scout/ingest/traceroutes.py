"""Line-oriented traceroute log format.

::

    # traceroute v1
    T <unix_ts> <src_id> <dst_id> <hop_count>
    H <ttl> <ip|*> <asn|?>
    ...

Blank lines and ``#`` comments are ignored when reading.
"""

from ..exceptions import ParseError, ValidationError
from ..validation import check_host_id, gc_paused, read_text
from .records import Hop, TracerouteRecord

HEADER = "# traceroute v1"


def _int(token, what, lineno):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"{what} {token!r} is not an integer", lineno) from None


def _parse_hop(fields, lineno):
    if len(fields) != 4:
        raise ParseError(f"hop line needs 4 fields, got {len(fields)}", lineno)
    ttl = _int(fields[1], "ttl", lineno)
    address = None if fields[2] == "*" else fields[2]
    asn = None if fields[3] == "?" else _int(fields[3], "asn", lineno)
    try:
        return Hop(ttl, address, asn)
    except ValidationError as exc:
        raise ValidationError(str(exc), lineno) from None


def parse_traceroute_file(source):
    """Parse a traceroute log into a list of :class:`TracerouteRecord` in file order."""
    text = read_text(source)
    with gc_paused():
        return _parse(text)


def _parse(text):
    records = []
    memo = {}  # hop line -> Hop; hop lines repeat across periodic traceroutes
    header = None  # (lineno, ts, src, dst, hop_count)
    hops = []

    def close(lineno):
        start, ts, src, dst, count = header
        if len(hops) != count:
            raise ParseError(f"record declares {count} hops but {len(hops)} follow", lineno)
        try:
            records.append(TracerouteRecord(ts, src, dst, tuple(hops)))
        except ValidationError as exc:
            raise ValidationError(str(exc), start) from None

    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        tag = fields[0]
        if tag == "T":
            if header is not None:
                close(lineno)
            if len(fields) != 5:
                raise ParseError(f"record header needs 5 fields, got {len(fields)}", lineno)
            ts = _int(fields[1], "timestamp", lineno)
            src = check_host_id(fields[2], lineno)
            dst = check_host_id(fields[3], lineno)
            count = _int(fields[4], "hop count", lineno)
            if count < 1:
                raise ValidationError(f"hop count must be positive, got {count}", lineno)
            header = (lineno, ts, src, dst, count)
            hops = []
        elif tag == "H":
            if header is None:
                raise ParseError("hop line before any record header", lineno)
            if len(hops) >= header[4]:
                raise ParseError(f"more hop lines than the declared {header[4]}", lineno)
            hop = memo.get(line)
            if hop is None:
                hop = memo[line] = _parse_hop(fields, lineno)
            if hop.ttl != len(hops) + 1:
                raise ValidationError(f"expected ttl {len(hops) + 1}, got {hop.ttl}", lineno)
            hops.append(hop)
        else:
            raise ParseError(f"unknown line tag {tag!r}", lineno)
    if header is not None:
        close(lineno + 1)
    return records


def format_record(record):
    lines = [f"T {record.timestamp} {record.src} {record.dst} {len(record.hops)}"]
    for hop in record.hops:
        addr = "*" if hop.address is None else hop.address
        asn = "?" if hop.asn is None else str(hop.asn)
        lines.append(f"H {hop.ttl} {addr} {asn}")
    return "\n".join(lines)


def serialize_traceroutes(records):
    """Render records in canonical form (header line, one field separator, trailing newline)."""
    parts = [HEADER]
    parts.extend(format_record(r) for r in records)
    return "\n".join(parts) + "\n"
