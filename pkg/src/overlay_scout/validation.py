"""Input checking helpers used by parsers, estimators and the CLI."""

import contextlib
import gc
import ipaddress
import numbers
import re

from .exceptions import ValidationError

_HOST_RE = re.compile(r"[A-Za-z0-9._-]+\Z")


def read_text(source):
    """Return the text content of ``source``.

    Accepts ``str``, ``bytes``/``bytearray`` (decoded as UTF-8) or any object
    with a ``read`` method (text or binary file handles).
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray, memoryview)):
        return bytes(source).decode("utf-8")
    if isinstance(source, str):
        return source
    raise TypeError(f"expected text, bytes or a readable stream, got {type(source).__name__}")


def is_host_id(value):
    return isinstance(value, str) and bool(_HOST_RE.match(value))


def check_host_id(value, lineno=None):
    if not is_host_id(value):
        raise ValidationError(f"invalid host id {value!r}", lineno)
    return value


def parse_ipv4(text):
    """Parse dotted-quad text into an ``IPv4Address`` or return None."""
    if not isinstance(text, str):
        return None
    try:
        return ipaddress.IPv4Address(text)
    except ValueError:
        return None


def is_ipv4(text):
    return parse_ipv4(text) is not None


def check_positive(value, name, *, integer=False, minimum=None):
    kind = numbers.Integral if integer else numbers.Real
    if isinstance(value, bool) or not isinstance(value, kind):
        raise ValidationError(f"{name} must be {'an integer' if integer else 'a number'}, got {value!r}")
    if minimum is not None:
        if value < minimum:
            raise ValidationError(f"{name} must be >= {minimum}, got {value!r}")
    elif not value > 0:
        raise ValidationError(f"{name} must be positive, got {value!r}")
    return value


def check_series_collection(series):
    """Normalise a collection of DelaySeries into a ``{(src, dst): series}`` dict."""
    from .ingest import DelaySeries

    if isinstance(series, DelaySeries):
        series = [series]
    if isinstance(series, dict):
        items = list(series.values())
    else:
        items = list(series)
    out = {}
    for s in items:
        if not isinstance(s, DelaySeries):
            raise TypeError(f"expected DelaySeries, got {type(s).__name__}")
        key = (s.src, s.dst)
        if key in out:
            raise ValidationError(f"duplicate series for pair {key[0]}->{key[1]}")
        out[key] = s
    return out



@contextlib.contextmanager
def gc_paused():
    """Suspend the cyclic collector while building millions of small objects."""
    enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if enabled:
            gc.enable()
