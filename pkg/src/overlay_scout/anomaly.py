"""Delay degradation detection and relay ranking.

A degradation on the direct path i->j at epoch t is a sample exceeding the
mean of the preceding ``window`` epochs by more than ``k`` population
standard deviations. Candidate relays are ranked by their fractional delay
gain over the degraded direct delay, and the top ``s`` relays of each event
feed the selection-frequency statistics.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .exceptions import ValidationError
from .validation import check_positive, check_series_collection

FAILURE_K = 3.0
OUTAGE_K = 10.0


@dataclass(frozen=True)
class AnomalyConfig:
    k: float = FAILURE_K
    window: int = 60
    top_set_size: int = 5

    def __post_init__(self):
        check_positive(self.k, "k")
        check_positive(self.window, "window", integer=True, minimum=2)
        check_positive(self.top_set_size, "top_set_size", integer=True, minimum=1)


@dataclass(frozen=True)
class AnomalyEvent:
    epoch: int
    src: str
    dst: str
    observed: float
    window_mean: float
    window_sigma: float
    k_used: float

    @property
    def key(self):
        return (self.epoch, self.src, self.dst)


@dataclass(frozen=True)
class RelayRanking:
    event: AnomalyEvent
    ranked: tuple  # ((relay, gain), ...) by gain descending

    @property
    def relays(self):
        return tuple(r for r, _ in self.ranked)


@dataclass(frozen=True)
class TopSetStats:
    f: dict  # host -> frequency in the top set
    order: tuple  # hosts sorted by f descending, then host id
    F: tuple  # cumulative frequency along ``order``
    N: int
    s: int

    def hosts_needed(self, level=0.5):
        """Smallest number of top hosts whose cumulative frequency reaches ``level``."""
        for z, value in enumerate(self.F):
            if value >= level - 1e-12:
                return z + 1
        return None


def rolling_stats(series, window=60):
    """Mean and population sigma of the ``window`` epochs before each epoch.

    Returns two arrays aligned with ``series.values``; NaN marks epochs whose
    window runs past the start of the series or contains a missing sample.
    """
    check_positive(window, "window", integer=True, minimum=2)
    values = series.values
    mean = np.full(values.size, np.nan)
    sigma = np.full(values.size, np.nan)
    if values.size > window:
        windows = sliding_window_view(values, window)[:-1]
        # NaN in a window propagates into both statistics
        mean[window:] = windows.mean(axis=1)
        sigma[window:] = windows.std(axis=1)
    return mean, sigma


def detect_anomalies(series, config):
    mean, sigma = rolling_stats(series, config.window)
    values = series.values
    with np.errstate(invalid="ignore"):
        hits = np.flatnonzero(values > mean + config.k * sigma)
    return [
        AnomalyEvent(
            series.start_epoch + int(i),
            series.src,
            series.dst,
            float(values[i]),
            float(mean[i]),
            float(sigma[i]),
            float(config.k),
        )
        for i in hits
    ]


def delay_gain(direct_delay, indirect_delay):
    """Fractional delay reduction of the indirect path relative to the direct one."""
    if not direct_delay > 0:
        raise ValidationError(f"direct delay must be positive, got {direct_delay!r}")
    return (direct_delay - indirect_delay) / direct_delay


def _hosts_of(series_map):
    return sorted({h for pair in series_map for h in pair})


def rank_relays(event, all_series, hosts=None):
    """Rank relays k not in {i, j} whose legs i->k and k->j are both measured at the event epoch."""
    series_map = check_series_collection(all_series)
    if hosts is None:
        hosts = _hosts_of(series_map)
    t = event.epoch
    scored = []
    for k in hosts:
        if k == event.src or k == event.dst:
            continue
        first = series_map.get((event.src, k))
        second = series_map.get((k, event.dst))
        if first is None or second is None:
            continue
        a = first.value_at(t)
        b = second.value_at(t)
        if a is None or b is None:
            continue
        scored.append((k, delay_gain(event.observed, a + b)))
    scored.sort(key=lambda kg: (-kg[1], kg[0]))
    return RelayRanking(event, tuple(scored))


def top_set_frequencies(rankings, s=5, hosts=None):
    """Normalised frequency with which each host appears in an event's top ``s`` relays.

    Only rankings with at least ``s`` eligible relays are counted. ``F`` is
    indexed by position in ``order`` and has one entry per host.
    """
    check_positive(s, "s", integer=True, minimum=1)
    rankings = list(rankings)
    counted = [r for r in rankings if len(r.ranked) >= s]
    n = len(counted)
    if n == 0:
        raise ValidationError("no degradation event has enough eligible relays to fill a top set")
    if hosts is None:
        seen = set()
        for r in rankings:
            seen.update((r.event.src, r.event.dst))
            seen.update(r.relays)
        hosts = sorted(seen)
    counts = dict.fromkeys(hosts, 0)
    for r in counted:
        for relay in r.relays[:s]:
            if relay not in counts:
                raise ValidationError(f"relay {relay!r} is not in the host list")
            counts[relay] += 1
    total = s * n
    order = tuple(sorted(counts, key=lambda h: (-counts[h], h)))
    cumulative = np.cumsum([counts[h] for h in order])
    return TopSetStats(
        f={h: counts[h] / total for h in hosts},
        order=order,
        F=tuple(float(c) / total for c in cumulative),
        N=n,
        s=s,
    )


@dataclass(frozen=True)
class PairAlternate:
    mean_direct: float
    best_relay: str
    mean_best_indirect: float

    @property
    def difference(self):
        return self.mean_direct - self.mean_best_indirect


@dataclass(frozen=True)
class AlternateSummary:
    per_pair: dict  # (src, dst) -> PairAlternate
    differences: np.ndarray  # sorted ascending
    cdf: np.ndarray  # empirical CDF at each sorted difference

    def fraction_at_or_below(self, x=0.0):
        if self.differences.size == 0:
            return float("nan")
        return float(np.searchsorted(self.differences, x, side="right")) / self.differences.size


def _delay_cube(series_map, hosts):
    index = {h: i for i, h in enumerate(hosts)}
    start = min(s.start_epoch for s in series_map.values())
    end = max(s.end_epoch for s in series_map.values())
    cube = np.full((len(hosts), len(hosts), end - start + 1), np.nan)
    for (src, dst), s in series_map.items():
        off = s.start_epoch - start
        cube[index[src], index[dst], off : off + len(s)] = s.values
    return cube


def best_alternate_summary(all_series, hosts=None):
    """Mean direct delay minus mean delay of the best one-hop alternate, per pair.

    An alternate's mean is taken over epochs where both of its legs are
    measured. Pairs with no measured direct epoch or no usable relay are left
    out.
    """
    series_map = check_series_collection(all_series)
    if not series_map:
        return AlternateSummary({}, np.array([]), np.array([]))
    if hosts is None:
        hosts = _hosts_of(series_map)
    hosts = list(hosts)
    cube = _delay_cube(series_map, hosts)
    index = {h: i for i, h in enumerate(hosts)}
    per_pair = {}
    for (src, dst) in sorted(series_map):
        direct = series_map[(src, dst)].values
        present = ~np.isnan(direct)
        if not present.any():
            continue
        i, j = index[src], index[dst]
        legs = cube[i, :, :] + cube[:, j, :]
        counts = np.sum(~np.isnan(legs), axis=1)
        counts[[i, j]] = 0
        usable = np.flatnonzero(counts)
        if usable.size == 0:
            continue
        means = np.nansum(legs[usable], axis=1) / counts[usable]
        # ties between relays go to the earlier host id
        best = int(np.argmin(means))
        per_pair[(src, dst)] = PairAlternate(
            float(direct[present].mean()), hosts[usable[best]], float(means[best])
        )
    diffs = np.sort([p.difference for p in per_pair.values()])
    cdf = np.arange(1, diffs.size + 1) / diffs.size if diffs.size else np.array([])
    return AlternateSummary(per_pair, diffs, cdf)


def exceedance_probability(series, k):
    """Fraction of measured samples above mean + k*sigma of the whole series."""
    v = series.values[~np.isnan(series.values)]
    if v.size == 0:
        return float("nan")
    return float(np.mean(v > v.mean() + k * v.std()))
