"""CSV delay measurements: ``epoch,src,dst,delay_ms``; absent rows are missing samples."""

import csv
import io
import math

import numpy as np
import pandas as pd

from ..exceptions import ParseError, ValidationError
from ..validation import check_host_id, gc_paused, is_host_id, read_text
from .records import DelaySeries

HEADER = ("epoch", "src", "dst", "delay_ms")


def parse_delay_file(source, epoch_len=60):
    """Parse delay rows into one :class:`DelaySeries` per directed pair.

    Series are returned sorted by ``(src, dst)``. Each spans the min..max epoch
    seen for its pair, with NaN in slots that had no row.
    """
    text = read_text(source)
    series = _parse_fast(text, epoch_len)
    if series is not None:
        return series
    with gc_paused():
        return _parse(text, epoch_len)


def _parse_fast(text, epoch_len):
    """Vectorised path for clean files; None means "use the line-by-line parser".

    The slow path is the reference: it also produces error messages with
    line numbers, so any doubt here defers to it.
    """
    if "#" in text or not text.startswith(",".join(HEADER) + "\n"):
        return None
    try:
        frame = pd.read_csv(
            io.StringIO(text),
            dtype={"epoch": "int64", "src": str, "dst": str, "delay_ms": "float64"},
            keep_default_na=False,
            na_filter=False,
            skip_blank_lines=False,
            float_precision="round_trip",
            engine="c",
        )
    except (ValueError, pd.errors.ParserError):
        return None
    if list(frame.columns) != list(HEADER) or frame.empty:
        return None
    delays = frame["delay_ms"].to_numpy()
    if not np.all(np.isfinite(delays)) or np.any(delays < 0):
        return None
    epochs = frame["epoch"].to_numpy()
    out = []
    for (src, dst), rows in sorted(frame.groupby(["src", "dst"], sort=False).indices.items()):
        if not (is_host_id(src) and is_host_id(dst)) or src == dst:
            return None
        e = epochs[rows]
        order = np.argsort(e, kind="stable")
        e = e[order]
        if np.any(np.diff(e) == 0):
            return None
        slots = np.full(int(e[-1] - e[0]) + 1, np.nan)
        slots[e - e[0]] = delays[rows][order]
        out.append(DelaySeries(src, dst, epoch_len, int(e[0]), slots))
    return out


def _parse(text, epoch_len):
    reader = csv.reader(io.StringIO(text))
    columns = {}  # pair -> (epochs, values, linenos)
    header_seen = False
    for lineno, row in enumerate(reader, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if row[0].startswith("#"):
            continue
        if not header_seen:
            if tuple(c.strip() for c in row) != HEADER:
                raise ParseError(f"expected header {','.join(HEADER)!r}", lineno)
            header_seen = True
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 columns, got {len(row)}", lineno)
        e_txt, src, dst, d_txt = row
        try:
            epoch = int(e_txt)
        except ValueError:
            raise ParseError(f"epoch {e_txt!r} is not an integer", lineno) from None
        try:
            delay = float(d_txt)
        except ValueError:
            raise ParseError(f"delay {d_txt!r} is not a number", lineno) from None
        if not math.isfinite(delay) or delay < 0:
            raise ValidationError(f"delay must be a finite non-negative number, got {d_txt!r}", lineno)
        col = columns.get((src, dst))
        if col is None:
            check_host_id(src, lineno)
            check_host_id(dst, lineno)
            if src == dst:
                raise ValidationError(f"source and destination are both {src!r}", lineno)
            col = columns[(src, dst)] = ([], [], [])
        col[0].append(epoch)
        col[1].append(delay)
        col[2].append(lineno)

    out = []
    for (src, dst) in sorted(columns):
        epochs, values, linenos = columns[(src, dst)]
        epochs = np.asarray(epochs, dtype=np.int64)
        order = np.argsort(epochs, kind="stable")
        sorted_epochs = epochs[order]
        dup = np.flatnonzero(np.diff(sorted_epochs) == 0)
        if dup.size:
            line = linenos[order[dup[0] + 1]]
            raise ValidationError(
                f"duplicate row for epoch {sorted_epochs[dup[0]]} {src}->{dst}", line
            )
        start = int(sorted_epochs[0])
        slots = np.full(int(sorted_epochs[-1]) - start + 1, np.nan)
        slots[epochs - start] = values
        out.append(DelaySeries(src, dst, epoch_len, start, slots))
    return out


def serialize_delays(series):
    """Render series as canonical CSV (pair order as given, epochs ascending, missing slots omitted)."""
    lines = [",".join(HEADER)]
    for s in series:
        prefix = f",{s.src},{s.dst},"
        for i in np.flatnonzero(~np.isnan(s.values)):
            lines.append(f"{s.start_epoch + int(i)}{prefix}{float(s.values[i])!r}")
    return "\n".join(lines) + "\n"
