"""Client for the pipe-delimited bulk IP-to-ASN whois protocol.

Query::

    begin
    verbose
    <ip1>
    ...
    end

Each answer line is ``ASN | IP | prefix | CC | registry | allocated | name``
with ``NA`` in the first field for unrouted addresses.
"""

import ipaddress
import logging
import socket

from ..exceptions import TransportError, PartialResponseError

log = logging.getLogger(__name__)


def parse_endpoint(text, default_port=43):
    host, sep, port = text.rpartition(":")
    if not sep:
        return text, default_port
    try:
        return host, int(port)
    except ValueError:
        raise ValueError(f"invalid port in endpoint {text!r}") from None


def build_query(ips):
    return "begin\nverbose\n" + "".join(f"{ip}\n" for ip in ips) + "end\n"


def parse_response(text):
    """Map each answered IP to its ASN (None for ``NA``).

    Banner and column-header lines are skipped; anything else that is not a
    well-formed answer raises :class:`TransportError`.
    """
    answers = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("Bulk mode") or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split("|")]
        if fields[0] == "AS":
            continue
        if len(fields) < 2:
            raise TransportError(f"malformed response line: {line!r}")
        first = fields[0].split()[0] if fields[0] else ""
        if first == "NA":
            asn = None
        elif first.isdigit() and int(first) > 0:
            asn = int(first)
        else:
            raise TransportError(f"unexpected ASN field in response line: {line!r}")
        try:
            ip = str(ipaddress.IPv4Address(fields[1]))
        except ValueError:
            raise TransportError(f"unexpected IP field in response line: {line!r}") from None
        answers[ip] = asn
    return answers


def bulk_resolve(endpoint, ips, timeout=30.0):
    """Resolve ``ips`` over one TCP exchange; returns ``[(ip, asn_or_None), ...]`` in input order."""
    ips = [str(ipaddress.IPv4Address(ip)) for ip in ips]
    if not ips:
        return []
    if isinstance(endpoint, str):
        endpoint = parse_endpoint(endpoint)
    unique = list(dict.fromkeys(ips))
    chunks = []
    try:
        with socket.create_connection(endpoint, timeout=timeout) as sock:
            sock.sendall(build_query(unique).encode("ascii"))
            sock.shutdown(socket.SHUT_WR)
            while True:
                chunk = sock.recv(65536)
                if not chunk:
                    break
                chunks.append(chunk)
    except OSError as exc:
        raise TransportError(f"whois exchange with {endpoint[0]}:{endpoint[1]} failed: {exc}") from exc
    try:
        text = b"".join(chunks).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise TransportError("response is not valid UTF-8") from exc
    answers = parse_response(text)
    missing = [ip for ip in unique if ip not in answers]
    if missing:
        raise PartialResponseError(missing)
    log.debug("resolved %d addresses via %s:%s", len(unique), *endpoint)
    return [(ip, answers[ip]) for ip in ips]
