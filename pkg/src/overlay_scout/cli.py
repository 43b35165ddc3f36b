"""Command-line front end: ``synth``, ``analyze``, ``resolve`` and ``rerun``."""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__, reports
from .anomaly import (
    FAILURE_K,
    OUTAGE_K,
    AnomalyConfig,
    best_alternate_summary,
    rank_relays,
    top_set_frequencies,
)
from .diversity import (
    AS,
    IP,
    border_disjoint,
    degree_distribution,
    divergence_results,
    greedy_edge_disjoint,
)
from .estimators import KSigmaDetector, threads_from_env
from .exceptions import OverlayScoutError
from .graph import (
    HopAsnMap,
    as_adjacencies,
    build_as_graph,
    build_ip_graph,
    latest_records,
    path_length_stats,
)
from .ingest import bulk_resolve, load_prefix_table, parse_delay_file, parse_traceroute_file
from .synth import SynthConfig, generate
from .validation import check_series_collection

log = logging.getLogger("overlay_scout")

ANALYSES = ("divergence", "disjoint", "anomalies", "rank", "topset", "degrees", "lengths", "cdf")
NEEDS_TRACEROUTES = {"divergence", "disjoint", "degrees", "lengths"}
NEEDS_DELAYS = {"anomalies", "rank", "topset", "cdf"}
PRESETS = {"failure": FAILURE_K, "outage": OUTAGE_K}


class UsageError(Exception):
    pass


def _anomaly_spec(text):
    parts = text.split(":")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"expected epoch:src:dst:ms, got {text!r}")
    epoch, src, dst, ms = parts
    try:
        return (int(epoch), src, dst, float(ms))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected epoch:src:dst:ms, got {text!r}") from None


def _negative_float(text):
    value = float(text)
    if not value < 0:
        raise argparse.ArgumentTypeError(f"exponent must be negative, got {text}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _non_negative_float(text):
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _router_range(text):
    lo, sep, hi = text.partition("-")
    try:
        lo, hi = int(lo), int(hi if sep else lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN-MAX, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"invalid router range {text!r}")
    return (lo, hi)


def _selection(text):
    chosen = [s.strip() for s in text.split(",") if s.strip()]
    unknown = sorted(set(chosen) - set(ANALYSES))
    if unknown or not chosen:
        raise argparse.ArgumentTypeError(f"unknown analysis {', '.join(unknown) or text!r}; choose from {','.join(ANALYSES)}")
    return tuple(a for a in ANALYSES if a in chosen)


def build_parser():
    parser = argparse.ArgumentParser(prog="overlay-scout", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic overlay measurement set")
    p.add_argument("--ases", type=_positive_int, default=50)
    p.add_argument("--exponent", type=_negative_float, default=-0.8)
    p.add_argument("--hosts", type=_positive_int, default=10)
    p.add_argument("--epochs", type=_positive_int, default=1440)
    p.add_argument("--epoch-len", type=_positive_int, default=60)
    p.add_argument("--routers-per-as", type=_router_range, default=(2, 3), metavar="MIN-MAX")
    p.add_argument("--base-delay", type=_positive_float, default=5.0, help="ms per IP hop")
    p.add_argument("--noise", type=_non_negative_float, default=1.0, help="uniform noise amplitude (ms)")
    p.add_argument("--traceroute-interval", type=_positive_int, default=600, help="seconds")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--anomaly", type=_anomaly_spec, action="append", default=[], metavar="EPOCH:SRC:DST:MS")
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("analyze", help="run path-diversity and degradation analyses")
    p.add_argument("--traceroutes", help="traceroute file (needed by divergence, disjoint, degrees, lengths)")
    p.add_argument("--delays", help="delay CSV (needed by anomalies, rank, topset, cdf)")
    p.add_argument("--prefixes", help="cidr,asn table; defaults to the ASNs in the traceroute hops")
    p.add_argument("--preset", choices=sorted(PRESETS), help="failure: k=3, outage: k=10")
    p.add_argument("--k", type=_positive_float, help="sigma multiplier (default 3)")
    p.add_argument("--window", type=_positive_int, default=60, help="baseline epochs")
    p.add_argument("--topset-size", type=_positive_int, default=5, help="relays per top set")
    p.add_argument("--epoch-len", type=_positive_int, default=60)
    p.add_argument("--do", type=_selection, default=ANALYSES, metavar="A,B,...", help=f"subset of {','.join(ANALYSES)} (default: all)")
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("resolve", help="map IPs to ASNs via a bulk whois server")
    p.add_argument("--server", required=True, metavar="HOST:PORT")
    p.add_argument("--ips", required=True, help="file with one IPv4 address per line")
    p.add_argument("--timeout", type=_positive_float, default=30.0)
    p.add_argument("--out", help="output CSV (default: stdout)")

    p = sub.add_parser("rerun", help="repeat a run recorded in a manifest.json")
    p.add_argument("manifest")
    return parser


def _manifest(command, argv, inputs, config, out_dir, seed=None):
    return {
        "argv": argv,
        "command": command,
        "config": config,
        "inputs": inputs,
        "out_dir": out_dir,
        "seed": seed,
        "version": __version__,
    }


def _write_outputs(out_dir, files):
    """Write ``{name: text}`` into ``out_dir``; remove everything written if any write fails."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        for name in sorted(files):
            path = out / name
            with open(path, "w", encoding="utf-8", newline="") as fh:
                written.append(path)
                fh.write(files[name])
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return [str(p) for p in written]


def _dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _synth_argv(args):
    argv = [
        "synth",
        "--ases", str(args.ases),
        "--exponent", repr(args.exponent),
        "--hosts", str(args.hosts),
        "--epochs", str(args.epochs),
        "--epoch-len", str(args.epoch_len),
        "--routers-per-as", f"{args.routers_per_as[0]}-{args.routers_per_as[1]}",
        "--base-delay", repr(args.base_delay),
        "--noise", repr(args.noise),
        "--traceroute-interval", str(args.traceroute_interval),
        "--seed", str(args.seed),
    ]
    for e, s, d, ms in args.anomaly:
        argv += ["--anomaly", f"{e}:{s}:{d}:{ms!r}"]
    return argv + ["--out-dir", args.out_dir]


def cmd_synth(args):
    config = SynthConfig(
        n_ases=args.ases,
        exponent=args.exponent,
        hosts=args.hosts,
        routers_per_as=args.routers_per_as,
        epochs=args.epochs,
        epoch_len=args.epoch_len,
        base_delay_per_hop=args.base_delay,
        noise=args.noise,
        anomaly_schedule=tuple(args.anomaly),
        seed=args.seed,
        traceroute_interval=args.traceroute_interval,
    )
    out = generate(config)
    topo = out.topology
    edges = "asn_a,asn_b\n" + "".join(f"{a},{b}\n" for a, b in sorted(topo.as_edges))
    hosts = "host,asn,access_router\n" + "".join(
        f"{h},{topo.host_as[h]},{topo.routers[topo.host_as[h]][topo.host_router[h]]}\n" for h in topo.hosts
    )
    config_json = {
        "anomaly_schedule": [list(e) for e in config.anomaly_schedule],
        "base_delay_per_hop": config.base_delay_per_hop,
        "epoch_len": config.epoch_len,
        "epochs": config.epochs,
        "exponent": config.exponent,
        "hosts": config.hosts,
        "n_ases": config.n_ases,
        "noise": config.noise,
        "routers_per_as": list(config.routers_per_as),
        "traceroute_interval": config.traceroute_interval,
        "topology_adjustments": dict(sorted(topo.metadata.items())),
    }
    manifest = _manifest("synth", _synth_argv(args), {}, config_json, args.out_dir, seed=config.seed)
    files = {
        "traceroutes.txt": out.traceroute_file,
        "delays.csv": out.delay_file,
        "truth.csv": out.truth_file,
        "prefixes.txt": out.prefix_file,
        "as_edges.csv": edges,
        "hosts.csv": hosts,
        "manifest.json": _dump_json(manifest),
    }
    for path in _write_outputs(args.out_dir, files):
        log.info("wrote %s", path)
    return 0


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _analyze_argv(args, k):
    argv = ["analyze"]
    for flag, value in (("--traceroutes", args.traceroutes), ("--delays", args.delays), ("--prefixes", args.prefixes)):
        if value is not None:
            argv += [flag, value]
    argv += [
        "--k", repr(k),
        "--window", str(args.window),
        "--topset-size", str(args.topset_size),
        "--epoch-len", str(args.epoch_len),
        "--do", ",".join(args.do),
        "--out-dir", args.out_dir,
    ]
    return argv


def cmd_analyze(args):
    selected = set(args.do)
    if selected & NEEDS_TRACEROUTES and not args.traceroutes:
        raise UsageError(f"--traceroutes is required for: {', '.join(sorted(selected & NEEDS_TRACEROUTES))}")
    if selected & NEEDS_DELAYS and not args.delays:
        raise UsageError(f"--delays is required for: {', '.join(sorted(selected & NEEDS_DELAYS))}")
    if args.k is not None and args.preset is not None and args.k != PRESETS[args.preset]:
        raise UsageError("--k and --preset disagree; give one of them")
    k = args.k if args.k is not None else PRESETS.get(args.preset, FAILURE_K)
    config = AnomalyConfig(k=k, window=args.window, top_set_size=args.topset_size)
    threads = threads_from_env(os.environ, default=os.cpu_count() or 1)

    files = {}
    summary = {}

    if selected & NEEDS_TRACEROUTES:
        records = parse_traceroute_file(_read(args.traceroutes))
        table = load_prefix_table(_read(args.prefixes)) if args.prefixes else HopAsnMap(records)
        latest = latest_records(records)
        summary["traceroutes"] = len(records)
        summary["pairs_with_paths"] = len(latest)
        if "lengths" in selected:
            stats = path_length_stats(records, table)
            files["lengths.csv"] = reports.lengths_csv(stats)
            summary["mean_ip_hops_per_as"] = stats.mean_hops_per_as
        if "divergence" in selected:
            results = divergence_results(latest, table)
            files["divergence.csv"] = reports.divergence_csv(results)
            summary["one_hop_paths"] = len(results)
        if "disjoint" in selected:
            files["disjoint.csv"] = reports.disjoint_csv(_disjoint_reports(records, latest, table))
        if "degrees" in selected:
            dist = degree_distribution(as_adjacencies(records, table))
            files["degrees.csv"] = reports.degrees_csv(dist)
            summary["ases"] = len(dist)
            summary["fitted_R"] = dist.fitted_R

    if selected & NEEDS_DELAYS:
        series = parse_delay_file(_read(args.delays), epoch_len=args.epoch_len)
        summary["delay_series"] = len(series)
        if selected & {"anomalies", "rank", "topset"}:
            series_map = check_series_collection(series)
            hosts = sorted({h for pair in series_map for h in pair})
            events = KSigmaDetector(config.k, config.window, n_jobs=threads).fit_predict(series_map)
            summary["event_count"] = len(events)
            if "anomalies" in selected:
                files["anomalies.csv"] = reports.anomalies_csv(events)
            if selected & {"rank", "topset"}:
                rankings = [rank_relays(e, series_map, hosts) for e in events]
                if "rank" in selected:
                    files["rankings.csv"] = reports.rankings_csv(rankings)
            if "topset" in selected:
                try:
                    stats = top_set_frequencies(rankings, config.top_set_size, hosts)
                except OverlayScoutError as exc:
                    raise OverlayScoutError(
                        f"top-set analysis impossible with {len(events)} degradation event(s): {exc}"
                    ) from exc
                files["topset.csv"] = reports.topset_csv(stats)
                summary["topset_events"] = stats.N
                summary["F0"] = stats.F[0]
                summary["hosts_needed_F_0.5"] = stats.hosts_needed(0.5)
        if "cdf" in selected:
            alt = best_alternate_summary(series)
            files["cdf.csv"] = reports.cdf_csv(alt)
            summary["pairs_compared"] = len(alt.per_pair)
            summary["fraction_better_alternate"] = (
                1.0 - alt.fraction_at_or_below(0.0) if alt.per_pair else None
            )

    files["summary.json"] = _dump_json(summary)
    inputs = {k: v for k, v in (("traceroutes", args.traceroutes), ("delays", args.delays), ("prefixes", args.prefixes)) if v}
    config_json = {
        "analyses": list(args.do),
        "epoch_len": args.epoch_len,
        "k": k,
        "top_set_size": args.topset_size,
        "window": args.window,
    }
    files["manifest.json"] = _dump_json(_manifest("analyze", _analyze_argv(args, k), inputs, config_json, args.out_dir))
    for path in _write_outputs(args.out_dir, files):
        log.info("wrote %s", path)
    return 0


def _disjoint_reports(records, latest, table):
    ip_graph = build_ip_graph(records)
    as_graph = build_as_graph(records, table)
    out = []
    for src, dst in sorted(latest):
        out.append(greedy_edge_disjoint(ip_graph, src, dst, level=IP))
        try:
            out.append(border_disjoint(ip_graph, src, dst, table))
        except OverlayScoutError as exc:
            log.warning("border-router paths skipped for %s->%s: %s", src, dst, exc)
        out.append(greedy_edge_disjoint(as_graph, src, dst, level=AS))
    return out


def cmd_resolve(args):
    ips = [line.strip() for line in _read(args.ips).splitlines() if line.strip() and not line.startswith("#")]
    results = bulk_resolve(args.server, ips, timeout=args.timeout)
    text = "ip,asn\n" + "".join(f"{ip},{'NA' if asn is None else asn}\n" for ip, asn in results)
    if args.out:
        _write_outputs(str(Path(args.out).parent), {Path(args.out).name: text})
    else:
        sys.stdout.write(text)
    return 0


def cmd_rerun(args):
    manifest = json.loads(_read(args.manifest))
    return main(manifest["argv"])


COMMANDS = {"synth": cmd_synth, "analyze": cmd_analyze, "resolve": cmd_resolve, "rerun": cmd_rerun}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (OverlayScoutError, ValueError, OSError) as exc:
        print(f"overlay-scout: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
