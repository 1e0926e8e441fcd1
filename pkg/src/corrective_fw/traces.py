"""Trace-file CSV writing, reading, and validation.

Schema (exact header, comma separated, '.' decimal, UTF-8, no footer):
iteration,elapsed_s,primal,fw_gap,active_set_size,step_kind,lmo_calls,extra1,extra2

extra1/extra2 are algorithm specific (split runs log dist^2 and the penalty;
sliding runs log inner iteration counts and the adopted branch) and may be
empty.  Floats are written with shortest round-trip formatting, so rewriting
parsed records reproduces the file byte for byte.
"""

import numpy as np

from .cfw import STEP_KINDS, TraceRecord
from .errors import TraceParseError

COLUMNS = (
    "iteration",
    "elapsed_s",
    "primal",
    "fw_gap",
    "active_set_size",
    "step_kind",
    "lmo_calls",
    "extra1",
    "extra2",
)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def format_trace(records):
    lines = [",".join(COLUMNS)]
    for r in records:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.iteration,
                    r.elapsed_s,
                    r.primal,
                    r.fw_gap,
                    r.active_set_size,
                    r.step_kind,
                    r.lmo_calls,
                    r.extra1,
                    r.extra2,
                )
            )
        )
    return "\n".join(lines) + "\n"


def write_trace(path, records):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_trace(records))


def _parse_optional(cell):
    if cell == "":
        return None
    try:
        return float(cell)
    except ValueError:
        return cell


def read_trace(path):
    records = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header.split(",") != list(COLUMNS):
            raise TraceParseError(f"bad header {header!r}", path=path, line=1)
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != len(COLUMNS):
                raise TraceParseError(
                    f"expected {len(COLUMNS)} fields, got {len(cells)}",
                    path=path,
                    line=lineno,
                )
            try:
                records.append(
                    TraceRecord(
                        iteration=int(cells[0]),
                        elapsed_s=float(cells[1]),
                        primal=float(cells[2]),
                        fw_gap=float(cells[3]),
                        active_set_size=int(cells[4]),
                        step_kind=cells[5],
                        lmo_calls=int(cells[6]),
                        extra1=_parse_optional(cells[7]),
                        extra2=_parse_optional(cells[8]),
                    )
                )
            except ValueError as exc:
                raise TraceParseError(str(exc), path=path, line=lineno) from exc
    return records


def validate_trace(path):
    """Parse and sanity-check a trace; returns the records on success."""
    records = read_trace(path)
    last_calls = -1
    last_iter = -1
    for i, r in enumerate(records, start=2):
        if r.step_kind not in STEP_KINDS:
            raise TraceParseError(f"unknown step kind {r.step_kind!r}", path=path, line=i)
        if r.lmo_calls < last_calls:
            raise TraceParseError("lmo_calls decreased", path=path, line=i)
        if r.iteration <= last_iter:
            raise TraceParseError("iteration did not increase", path=path, line=i)
        if r.active_set_size < 1:
            raise TraceParseError("active_set_size below 1", path=path, line=i)
        last_calls = r.lmo_calls
        last_iter = r.iteration
    return records
