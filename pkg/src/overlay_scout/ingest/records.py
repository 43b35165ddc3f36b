"""Canonical in-memory measurement records.

Unresponsive hop addresses and unknown ASNs are both represented by ``None``.
Missing delay samples are ``NaN`` slots in a read-only float array.
"""

from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ValidationError
from ..validation import check_host_id, is_ipv4

UNRESPONSIVE = None
UNKNOWN = None


@dataclass(frozen=True)
class Hop:
    ttl: int
    address: str | None
    asn: int | None = None

    def __post_init__(self):
        if isinstance(self.ttl, bool) or not isinstance(self.ttl, int) or self.ttl < 1:
            raise ValidationError(f"hop ttl must be a positive integer, got {self.ttl!r}")
        if self.address is not None and not is_ipv4(self.address):
            raise ValidationError(f"hop address {self.address!r} is not an IPv4 address")
        if self.asn is not None and (isinstance(self.asn, bool) or not isinstance(self.asn, int) or self.asn <= 0):
            raise ValidationError(f"hop asn must be a positive integer, got {self.asn!r}")
        if self.address is None and self.asn is not None:
            raise ValidationError("an unresponsive hop cannot carry an ASN")

    @property
    def responsive(self):
        return self.address is not None


@dataclass(frozen=True)
class TracerouteRecord:
    """One observed hop-by-hop path between two overlay hosts."""

    timestamp: int
    src: str
    dst: str
    hops: tuple[Hop, ...]

    def __post_init__(self):
        object.__setattr__(self, "hops", tuple(self.hops))
        if isinstance(self.timestamp, bool) or not isinstance(self.timestamp, int):
            raise ValidationError(f"timestamp must be an integer, got {self.timestamp!r}")
        check_host_id(self.src)
        check_host_id(self.dst)
        if self.src == self.dst:
            raise ValidationError(f"traceroute source and destination are both {self.src!r}")
        if not self.hops:
            raise ValidationError("traceroute record has no hops")
        for expected, hop in enumerate(self.hops, start=1):
            if hop.ttl != expected:
                raise ValidationError(
                    f"hop TTLs must run 1..{len(self.hops)} in order; found {hop.ttl} at position {expected}"
                )

    @property
    def pair(self):
        return (self.src, self.dst)

    @property
    def addresses(self):
        return tuple(h.address for h in self.hops)


@dataclass(frozen=True, eq=False)
class DelaySeries:
    """Epoch-indexed delays (ms) for one directed host pair.

    ``values[i]`` is the delay at epoch ``start_epoch + i``; ``NaN`` marks a
    missing measurement.
    """

    src: str
    dst: str
    epoch_len: int
    start_epoch: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_host_id(self.src)
        check_host_id(self.dst)
        if self.src == self.dst:
            raise ValidationError(f"delay series source and destination are both {self.src!r}")
        if isinstance(self.epoch_len, bool) or not isinstance(self.epoch_len, (int, np.integer)) or self.epoch_len <= 0:
            raise ValidationError(f"epoch_len must be a positive integer, got {self.epoch_len!r}")
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ValidationError("delay series needs at least one slot")
        present = values[~np.isnan(values)]
        if np.any(present < 0) or np.any(np.isinf(present)):
            raise ValidationError(f"delay series {self.src}->{self.dst} contains a negative or infinite delay")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "start_epoch", int(self.start_epoch))
        object.__setattr__(self, "epoch_len", int(self.epoch_len))

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, DelaySeries):
            return NotImplemented
        return (
            (self.src, self.dst, self.epoch_len, self.start_epoch)
            == (other.src, other.dst, other.epoch_len, other.start_epoch)
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    __hash__ = None

    @property
    def pair(self):
        return (self.src, self.dst)

    @property
    def end_epoch(self):
        """Last epoch covered (inclusive)."""
        return self.start_epoch + self.values.size - 1

    @property
    def epochs(self):
        return np.arange(self.start_epoch, self.end_epoch + 1)

    @property
    def missing(self):
        return np.isnan(self.values)

    def value_at(self, epoch):
        """Delay at ``epoch`` or None when missing or out of range."""
        i = epoch - self.start_epoch
        if i < 0 or i >= self.values.size:
            return None
        v = self.values[i]
        return None if np.isnan(v) else float(v)
