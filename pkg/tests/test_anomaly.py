import math
import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import series
from overlay_scout.anomaly import (
    AnomalyConfig,
    AnomalyEvent,
    best_alternate_summary,
    delay_gain,
    detect_anomalies,
    exceedance_probability,
    rank_relays,
    rolling_stats,
    top_set_frequencies,
    RelayRanking,
)
from overlay_scout.exceptions import ValidationError

ALTERNATING = [90.0, 110.0] * 30


def test_constant_series_stats():
    mean, sigma = rolling_stats(series("a", "b", [50.0] * 61))
    assert (mean[60], sigma[60]) == (50.0, 0.0)
    assert np.isnan(mean[:60]).all()


def test_missing_slot_makes_stats_unavailable():
    values = [50.0] * 61
    values[10] = float("nan")
    mean, sigma = rolling_stats(series("a", "b", values + [50.0] * 11))
    assert np.isnan(mean[60]) and np.isnan(sigma[70])
    assert mean[71] == 50.0


def test_alternating_stats_against_statistics_module():
    mean, sigma = rolling_stats(series("a", "b", ALTERNATING + [0.0]))
    assert mean[60] == pytest.approx(statistics.fmean(ALTERNATING), abs=1e-12)
    assert sigma[60] == pytest.approx(statistics.pstdev(ALTERNATING), abs=1e-12)
    assert (mean[60], sigma[60]) == pytest.approx((100.0, 10.0))


@pytest.mark.parametrize("value, fires", [(131.0, True), (129.0, False)])
def test_threshold_examples(value, fires):
    events = detect_anomalies(series("a", "b", ALTERNATING + [value]), AnomalyConfig(k=3))
    assert bool(events) is fires
    if fires:
        (e,) = events
        assert (e.epoch, e.observed) == (60, value)
        assert e.observed > e.window_mean + e.k_used * e.window_sigma


def test_constant_series_never_fires():
    assert detect_anomalies(series("a", "b", [50.0] * 200), AnomalyConfig(k=0.1)) == []


def test_missing_value_never_fires():
    assert detect_anomalies(series("a", "b", ALTERNATING + [float("nan")]), AnomalyConfig()) == []


def test_config_validation():
    with pytest.raises(ValidationError):
        AnomalyConfig(window=1)
    with pytest.raises(ValidationError):
        AnomalyConfig(k=0)
    with pytest.raises(ValidationError):
        AnomalyConfig(top_set_size=0)


delays = st.lists(
    st.one_of(st.floats(1.0, 500.0, allow_nan=False), st.just(float("nan"))), min_size=3, max_size=40
)


@settings(max_examples=200)
@given(delays, st.integers(2, 8))
def test_outages_are_failures(values, window):
    s = series("a", "b", values)
    outages = {e.key for e in detect_anomalies(s, AnomalyConfig(k=10, window=window))}
    failures = {e.key for e in detect_anomalies(s, AnomalyConfig(k=3, window=window))}
    assert outages <= failures


@settings(max_examples=200)
@given(delays, st.integers(2, 8), st.integers(-4, 4))
def test_events_invariant_under_scaling(values, window, power):
    c = 2.0**power  # exact in binary floating point
    cfg = AnomalyConfig(k=3, window=window)
    base = [e.epoch for e in detect_anomalies(series("a", "b", values), cfg)]
    scaled = [e.epoch for e in detect_anomalies(series("a", "b", [v * c for v in values]), cfg)]
    assert base == scaled


def test_rolling_stats_brute_force():
    rng = np.random.default_rng(4)
    values = rng.uniform(10, 20, 30)
    values[[5, 17]] = np.nan
    mean, sigma = rolling_stats(series("a", "b", values), 4)
    for t in range(30):
        win = values[t - 4 : t] if t >= 4 else None
        if win is None or np.isnan(win).any():
            assert np.isnan(mean[t]) and np.isnan(sigma[t])
        else:
            assert mean[t] == pytest.approx(statistics.fmean(win))
            assert sigma[t] == pytest.approx(statistics.pstdev(win))


def test_delay_gain_examples():
    assert delay_gain(100, 80) == pytest.approx(0.2)
    assert delay_gain(100, 100) == 0.0
    assert delay_gain(100, 150) == pytest.approx(-0.5)
    with pytest.raises(ValidationError):
        delay_gain(0, 10)


@given(st.integers(1, 10**4), st.integers(0, 10**4), st.integers(0, 10**4))
def test_delay_gain_decreasing(direct, a, b):
    if a < b:
        assert delay_gain(direct, a) > delay_gain(direct, b)


def _event(epoch=0, observed=200.0):
    return AnomalyEvent(epoch, "i", "j", observed, 100.0, 10.0, 3.0)


def test_rank_relays_examples():
    data = [
        series("i", "j", [200.0]),
        series("i", "k1", [90.0]), series("k1", "j", [90.0]),
        series("i", "k2", [50.0]), series("k2", "j", [50.0]),
        series("i", "k3", [10.0]), series("k3", "j", [float("nan")]),
    ]
    ranking = rank_relays(_event(), data)
    assert ranking.relays == ("k2", "k1")
    assert [g for _, g in ranking.ranked] == pytest.approx([0.5, 0.1])
    assert rank_relays(_event(), [series("i", "j", [200.0])]).ranked == ()


def test_rank_ties_by_host_id():
    data = [series("i", h, [50.0]) for h in ("z", "b")] + [series(h, "j", [50.0]) for h in ("z", "b")]
    assert rank_relays(_event(), data).relays == ("b", "z")


def _ranking(relays, epoch=0):
    return RelayRanking(_event(epoch), tuple((r, 1.0 - 0.1 * n) for n, r in enumerate(relays)))


def test_topset_single_event():
    hosts = ["i", "j", "a", "b", "c", "d", "e", "x"]
    stats = top_set_frequencies([_ranking("abcde")], 5, hosts)
    assert stats.N == 1
    assert [stats.f[h] for h in "abcde"] == [0.2] * 5
    assert stats.F == pytest.approx((0.2, 0.4, 0.6, 0.8, 1.0, 1.0, 1.0, 1.0))
    assert stats.hosts_needed(0.5) == 3


def test_topset_two_events_and_skips():
    rankings = [_ranking("abcde", 0), _ranking("afghi", 1), _ranking("abc", 2)]
    stats = top_set_frequencies(rankings, 5)
    assert stats.N == 2
    assert stats.f["a"] == pytest.approx(2 / 10)
    assert stats.order[0] == "a"
    with pytest.raises(ValidationError):
        top_set_frequencies([_ranking("abc")], 5)


@settings(max_examples=100)
@given(st.lists(st.permutations("abcdefg"), min_size=1, max_size=6), st.integers(1, 7))
def test_topset_sums_to_one(perms, s):
    stats = top_set_frequencies([_ranking(p, n) for n, p in enumerate(perms)], s)
    assert math.isclose(sum(stats.f.values()), 1.0, abs_tol=1e-9)
    assert all(a <= b for a, b in zip(stats.F, stats.F[1:]))
    assert stats.F[-1] == 1.0


def test_best_alternate_examples():
    data = [
        series("a", "b", [100.0, 100.0]),
        series("a", "r", [40.0, 40.0]), series("r", "b", [40.0, float("nan")]),
        series("a", "q", [70.0, 70.0]), series("q", "b", [70.0, 70.0]),
    ]
    summary = best_alternate_summary(data)
    p = summary.per_pair[("a", "b")]
    assert (p.best_relay, p.mean_direct, p.mean_best_indirect, p.difference) == ("r", 100.0, 80.0, 20.0)
    worse = best_alternate_summary([series("a", "b", [10.0]), series("a", "q", [70.0]), series("q", "b", [70.0])])
    assert worse.per_pair[("a", "b")].difference == -130.0


def test_best_alternate_excludes_unmeasured_direct():
    data = [series("a", "b", [float("nan")]), series("a", "r", [1.0]), series("r", "b", [1.0])]
    assert ("a", "b") not in best_alternate_summary(data).per_pair


def test_best_alternate_brute_force():
    rng = np.random.default_rng(9)
    hosts = ["h0", "h1", "h2", "h3"]
    data = {}
    for s in hosts:
        for d in hosts:
            if s != d:
                v = rng.uniform(5, 50, 6)
                v[rng.random(6) < 0.3] = np.nan
                data[(s, d)] = v
    summary = best_alternate_summary([series(s, d, v) for (s, d), v in data.items()])
    for (s, d), direct in data.items():
        if np.isnan(direct).all():
            continue
        best = None
        for r in hosts:
            if r in (s, d):
                continue
            sums = [x + y for x, y in zip(data[(s, r)], data[(r, d)]) if not (math.isnan(x) or math.isnan(y))]
            if sums:
                m = statistics.fmean(sums)
                if best is None or m < best:
                    best = m
        if best is None:
            assert (s, d) not in summary.per_pair
        else:
            expected = statistics.fmean(x for x in direct if not math.isnan(x)) - best
            assert summary.per_pair[(s, d)].difference == pytest.approx(expected)


def test_cdf_and_fraction():
    data = [series("a", "b", [100.0]), series("a", "r", [10.0]), series("r", "b", [10.0]),
            series("b", "a", [1.0]), series("b", "r", [10.0]), series("r", "a", [10.0])]
    summary = best_alternate_summary(data)
    assert list(summary.cdf) == sorted(summary.cdf)
    assert summary.cdf[-1] == 1.0
    assert summary.fraction_at_or_below(0.0) == pytest.approx(
        sum(p.difference <= 0 for p in summary.per_pair.values()) / len(summary.per_pair)
    )


def test_exceedance_probability():
    s = series("a", "b", [1.0] * 99 + [1000.0])
    assert exceedance_probability(s, 3) == 0.01
    assert math.isnan(exceedance_probability(series("a", "b", [float("nan")]), 3))
