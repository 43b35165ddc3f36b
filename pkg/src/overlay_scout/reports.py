"""Deterministic CSV renderings of analysis results.

Floats are written with ``repr`` so that values read back compare equal to
the in-memory results. Absent divergence hops are written as ``NONE``.
"""

import csv
import io

NONE = "NONE"


def _csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _num(x):
    if x is None:
        return NONE
    if isinstance(x, float):
        return repr(x)
    return str(x)


def divergence_csv(results):
    return _csv(
        ("src", "dst", "relay", "ip_div", "as_div"),
        ((*r.pair, r.relay, _num(r.ip_divergence_hop), _num(r.as_divergence_hop)) for r in results),
    )


def disjoint_csv(reports):
    return _csv(("src", "dst", "level", "mode", "count"), ((*r.pair, r.level, r.mode, r.count) for r in reports))


def degrees_csv(distribution):
    return _csv(
        ("rank", "asn", "degree"),
        ((rank, asn, deg) for rank, (asn, deg) in enumerate(distribution.entries, start=1)),
    )


def anomalies_csv(events):
    return _csv(
        ("epoch", "src", "dst", "observed", "mean", "sigma", "k"),
        ((e.epoch, e.src, e.dst, _num(e.observed), _num(e.window_mean), _num(e.window_sigma), _num(e.k_used)) for e in events),
    )


def rankings_csv(rankings):
    rows = []
    for r in rankings:
        e = r.event
        for rank, (relay, gain) in enumerate(r.ranked, start=1):
            rows.append((e.epoch, e.src, e.dst, rank, relay, _num(gain)))
    return _csv(("epoch", "src", "dst", "rank", "relay", "gain"), rows)


def topset_csv(stats):
    return _csv(
        ("z", "host", "f", "F"),
        ((z, host, _num(stats.f[host]), _num(stats.F[z])) for z, host in enumerate(stats.order)),
    )


def lengths_csv(stats):
    return _csv(
        ("src", "dst", "ip_hops", "as_hops", "hops_per_as"),
        ((*pair, p.ip_hop_count, p.as_hop_count, _num(p.hops_per_as)) for pair, p in stats.per_pair.items()),
    )


def cdf_csv(summary):
    pairs = sorted(summary.per_pair.items(), key=lambda kv: (kv[1].difference, kv[0]))
    n = len(pairs)
    return _csv(
        ("src", "dst", "best_relay", "mean_direct", "mean_best_indirect", "difference", "cdf"),
        (
            (*pair, p.best_relay, _num(p.mean_direct), _num(p.mean_best_indirect), _num(p.difference), _num((i + 1) / n))
            for i, (pair, p) in enumerate(pairs)
        ),
    )


def truth_rows(text):
    """Parse a ``epoch,src,dst,added_delay`` ground-truth CSV into tuples."""
    reader = csv.DictReader(io.StringIO(text))
    return [(int(r["epoch"]), r["src"], r["dst"], float(r["added_delay"])) for r in reader]
