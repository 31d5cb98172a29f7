"""Plain-text outputs: CSV tables with a commented provenance header.

Every file starts with ``#`` lines carrying the package version and the
full run configuration as sorted JSON. Nothing time-dependent is written, so
an identical configuration and seed reproduce the file byte for byte.
Floats are written with ``repr``, which round-trips exactly.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__

MAGIC = "riemann-cdt"


class OutputError(OSError):
    """Writing an output file failed; ``path`` names the file."""

    def __init__(self, path, cause: OSError):
        super().__init__(f"cannot write {path}: {cause.strerror or cause}")
        self.path = Path(path)
        self.cause = cause


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return "nan" if math.isnan(x) else repr(x)
    return str(value)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def header_lines(kind: str, meta: dict) -> list[str]:
    return [
        f"# {MAGIC} {__version__}",
        f"# kind: {kind}",
        "# config: " + json.dumps(_jsonable(meta), sort_keys=True),
    ]


def ensure_dir(path) -> Path:
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(path, exc) from exc
    return path


def write_table(path, kind: str, meta: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    ensure_dir(path.parent)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            for line in header_lines(kind, meta):
                fh.write(line + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OutputError(path, exc) from exc
    return path


def read_table(path):
    """(meta, columns, rows as strings) from a file written by write_table."""
    meta, body = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# config: "):
                meta = json.loads(line[len("# config: "):])
            elif not line.startswith("#"):
                body.append(line)
    reader = csv.reader(body)
    columns = next(reader, [])
    return meta, columns, [row for row in reader]


def read_body(path) -> str:
    """Everything below the comment header."""
    with open(path, encoding="utf-8") as fh:
        return "".join(line for line in fh if not line.startswith("#"))


# ---- specific tables ------------------------------------------------------

def write_waveform(path, meta: dict, t, columns: dict[float, tuple]) -> Path:
    """``columns`` maps omega to (f, F, singular) arrays sampled on ``t``."""
    names = ["t"]
    arrays = [np.asarray(t)]
    for om, (f, F, sing) in columns.items():
        tag = f"omega{om:g}"
        names += [f"f_{tag}", f"F_{tag}", f"singular_{tag}"]
        arrays += [np.asarray(f), np.asarray(F), np.asarray(sing, dtype=bool)]
    rows = zip(*arrays)
    return write_table(path, "waveform", meta, names, rows)


def write_scan(path, meta: dict, records) -> Path:
    n = max((len(r.p_plus_series) for r in records), default=0)
    names = ["E", "sor", "sor_err", "quasi_energy", "error"] + [f"p_plus_m{m}" for m in range(1, n + 1)]

    def row(r):
        p = list(r.p_plus_series[:, 1]) if len(r.p_plus_series) else []
        p += [None] * (n - len(p))
        return [r.E, r.sor, r.sor_err, r.quasi_energy, r.error or ""] + p

    return write_table(path, "scan", meta, names, (row(r) for r in records))


def write_sor(path, meta: dict, records) -> Path:
    rows = ([r.E, r.sor, r.sor_err] for r in records)
    return write_table(path, "sor", meta, ["E", "sor", "sor_err"], rows)


def lab_time_ms(m, j_lab_hz: float):
    """Stroboscopic time in ms; one period is 1 / J_lab."""
    return np.asarray(m, dtype=float) * (1e3 / j_lab_hz)


def write_series(path, meta: dict, records, j_lab_hz: float) -> Path:
    def rows():
        for r in records:
            for m, p, err in r.p_plus_series:
                yield [r.E, int(m), float(lab_time_ms(m, j_lab_hz)), p, err]

    return write_table(path, "series", meta, ["E", "m", "t_lab_ms", "p_plus", "std_err"], rows())


def report_text(report_dict: dict) -> str:
    return "".join(f"{k}={_fmt(v)}\n" for k, v in report_dict.items())


def write_report(stem, meta: dict, report_dict: dict, kind: str = "zero_report") -> tuple[Path, Path]:
    """``stem``.txt as key=value lines and ``stem``.json with the config."""
    stem = Path(stem)
    ensure_dir(stem.parent)
    txt, js = stem.with_suffix(".txt"), stem.with_suffix(".json")
    try:
        with open(txt, "w", encoding="utf-8") as fh:
            for line in header_lines(kind, meta):
                fh.write(line + "\n")
            fh.write(report_text(report_dict))
        payload = {"version": __version__, "config": meta, "report": report_dict}
        with open(js, "w", encoding="utf-8") as fh:
            json.dump(_jsonable(payload), fh, sort_keys=True, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise OutputError(txt, exc) from exc
    return txt, js
