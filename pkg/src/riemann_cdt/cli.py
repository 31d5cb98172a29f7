"""Command-line front end.

Commands: waveform, scan, refine, omega-sweep, oracle, confirm. Settings come
from built-in per-command defaults, then an optional flat ``key = value``
config file (``--config``), then command-line flags, in increasing priority.

Exit codes: 0 success, 1 invalid configuration, 2 numerical failure,
3 I/O failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__, cdt, records
from .driving import DrivingError, PERIOD, PhaseProfile, Target
from .floquet import SimConfig
from .measurement import RNG_ALGORITHM, ShotModel
from .specfun import QuadratureError, bessel_k_crosscheck, find_root, sign_changes

log = logging.getLogger("riemann_cdt")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("waveform", "scan", "refine", "omega-sweep", "oracle", "confirm")

# energy windows per command and target: (start, end, step)
_WINDOWS = {
    "scan": {Target.RIEMANN: (10.0, 18.0, 1.0), Target.POLYA: (6.0, 12.0, 1.0)},
    "refine": {Target.RIEMANN: (13.5, 14.5, 0.1), Target.POLYA: (8.5, 9.5, 0.1)},
    "oracle": {Target.RIEMANN: (0.0, 30.0, 0.05), Target.POLYA: (0.0, 25.0, 0.05)},
}
_WINDOWS["omega-sweep"] = _WINDOWS["refine"]
_WINDOWS["confirm"] = _WINDOWS["refine"]
_WINDOWS["waveform"] = _WINDOWS["refine"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    target: Target = Target.RIEMANN
    e_start: float = 0.0
    e_end: float = 0.0
    e_step: float = 0.1
    E: float | None = None
    omega: float = 8.0
    omegas: tuple[float, ...] = ()
    periods: int = 20
    shots: int | None = None
    fidelity: float = 0.995
    spam: bool = True
    seed: int = 0
    steps: int = 1024
    workers: int = 1
    samples: int = 1001
    j_lab_hz: float = 4000.0
    out: str = "out"

    def __post_init__(self):
        checks = [
            (self.command in COMMANDS, f"unknown command {self.command!r}"),
            (self.e_step > 0, "e-step must be positive"),
            (self.e_start >= 0, "e-start must be >= 0"),
            (self.command == "oracle" or self.e_end >= self.e_start, "e-end must be >= e-start"),
            (self.E is None or (math.isfinite(self.E) and self.E >= 0), "e must be finite and >= 0"),
            (self.omega >= 1, "omega must be >= 1"),
            (all(o >= 1 for o in self.omegas), "every omega must be >= 1"),
            (self.periods >= 1, "periods must be >= 1"),
            (self.shots is None or self.shots >= 1, "shots must be >= 1"),
            (0.5 < self.fidelity <= 1.0, "fidelity must lie in (0.5, 1]"),
            (self.seed >= 0, "seed must be >= 0"),
            (self.steps >= 64, "steps must be >= 64"),
            (self.workers >= 1, "workers must be >= 1"),
            (self.samples >= 2, "samples must be >= 2"),
            (self.j_lab_hz > 0, "j-lab-hz must be positive"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    def shot_model(self) -> ShotModel | None:
        if self.shots is None:
            return None
        return ShotModel(self.shots, self.fidelity, self.seed, spam=self.spam)

    def sim(self) -> SimConfig:
        return SimConfig(1.0, self.steps, self.periods)

    def metadata(self) -> dict:
        meta = asdict(self)
        meta["target"] = self.target.value
        meta["omegas"] = list(self.omegas)
        meta["mode"] = "exact" if self.shots is None else "shots"
        if self.shots is not None:
            meta["rng"] = RNG_ALGORITHM
        meta["version"] = __version__
        return meta


# ---- configuration assembly ----------------------------------------------

_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_ALIASES = {"e": "E", "output_dir": "out", "j_lab": "j_lab_hz"}


def _convert(key: str, raw):
    if raw is None:
        return None
    kind = _FIELD_TYPES[key]
    try:
        if key == "target":
            return Target.parse(raw)
        if key == "omegas":
            if isinstance(raw, str):
                raw = [x for x in raw.replace(",", " ").split() if x]
            return tuple(float(x) for x in raw)
        if key == "shots":
            if isinstance(raw, str) and raw.strip().lower() in ("", "none", "exact"):
                return None
            return int(raw)
        if kind in (bool, "bool"):
            if isinstance(raw, bool):
                return raw
            flag = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}
            if raw.strip().lower() not in flag:
                raise ValueError("expected true or false")
            return flag[raw.strip().lower()]
        if "int" in kind:
            return int(raw)
        if "float" in kind:
            return float(raw)
        return str(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment. Keys use - or _."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_").lower()
        key = _ALIASES.get(key, key)
        if key not in _FIELD_TYPES or key == "command":
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _convert(key, value)
    return out


def _defaults(command: str, target: Target) -> dict:
    start, end, step = _WINDOWS[command][target]
    d = {"e_start": start, "e_end": end, "e_step": step}
    if command == "waveform":
        d.update(E=4.0, omega=1.0)
    elif command == "scan":
        d.update(omega=8.0, periods=20)
    elif command in ("refine", "confirm"):
        d.update(omega=8.0, periods=30)
    elif command == "omega-sweep":
        d.update(omegas=(6.0, 8.0, 12.0), periods=30)
    return d


def build_config(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    flag_values = {}
    for key in _FIELD_TYPES:
        if key == "command":
            continue
        value = getattr(args, key, None)
        if value is not None:
            flag_values[key] = _convert(key, value)
    if getattr(args, "exact", False):
        flag_values["shots"] = None
    default_target = Target.POLYA if args.command == "omega-sweep" else Target.RIEMANN
    target = flag_values.get("target", file_values.get("target", default_target))
    merged = {"target": target, **_defaults(args.command, target), **file_values, **flag_values}
    if args.command == "waveform" and not merged.get("omegas"):
        merged["omegas"] = (merged["omega"],)
    return RunConfig(command=args.command, **merged)


# ---- commands ----------------------------------------------------------

def _path(cfg: RunConfig, name: str) -> Path:
    return Path(cfg.out) / f"{cfg.target.value}_{name}"


def cmd_waveform(cfg: RunConfig) -> int:
    profile = PhaseProfile.build(cfg.target, cfg.E, max(cfg.omegas))
    t = np.linspace(0.0, PERIOD, cfg.samples)
    cols = {}
    for om in cfg.omegas:
        samples = profile.field(t, om)
        cols[om] = (samples.f, profile.rescaled_phase(t, om), samples.singular)
    path = records.write_waveform(_path(cfg, "waveform.csv"), cfg.metadata(), t, cols)
    print(f"waveform {cfg.target.value} E={cfg.E:g} omegas={list(cfg.omegas)} -> {path}")
    return EXIT_OK


def _write_scan_files(cfg: RunConfig, recs, prefix: str) -> list[Path]:
    meta = cfg.metadata()
    return [
        records.write_scan(_path(cfg, f"{prefix}scan.csv"), meta, recs),
        records.write_sor(_path(cfg, f"{prefix}sor.csv"), meta, recs),
        records.write_series(_path(cfg, f"{prefix}series.csv"), meta, recs, cfg.j_lab_hz),
    ]


def cmd_scan(cfg: RunConfig) -> int:
    recs = cdt.scan(cfg.target, cfg.e_start, cfg.e_end, cfg.e_step, cfg.omega, cfg.periods,
                    cfg.shot_model(), cfg.sim(), workers=cfg.workers)
    paths = _write_scan_files(cfg, recs, "")
    changes = [(float(a), float(b)) for a, b in sign_changes([r.E for r in recs], [r.sor for r in recs])]
    for r in recs:
        print(f"E={r.E:g} sor={r.sor:+.6f}" + (f" error={r.error}" if r.error else ""))
    print(f"sign changes: {changes or 'none'}; wrote {', '.join(map(str, paths))}")
    return EXIT_NUMERIC if any(r.error for r in recs) else EXIT_OK


def cmd_refine(cfg: RunConfig) -> int:
    report, recs = cdt.refine(cfg.target, (cfg.e_start, cfg.e_end), cfg.e_step, cfg.omega, cfg.periods,
                              cfg.shot_model(), cfg.sim(), workers=cfg.workers)
    _write_scan_files(cfg, recs, "refine_")
    txt, _ = records.write_report(_path(cfg, "zero_report"), cfg.metadata(), report.as_dict())
    sys.stdout.write(records.report_text(report.as_dict()))
    print(f"wrote {txt}")
    return EXIT_OK if report.status == "ok" else EXIT_NUMERIC


def cmd_omega_sweep(cfg: RunConfig) -> int:
    if len(cfg.omegas) < 2:
        raise ConfigError("omega-sweep needs at least two omegas")
    rows, reports, failed = [], [], False
    for om in cfg.omegas:
        try:
            report, _ = cdt.refine(cfg.target, (cfg.e_start, cfg.e_end), cfg.e_step, om, cfg.periods,
                                   cfg.shot_model(), cfg.sim(), workers=cfg.workers)
            d = report.as_dict()
        except (DrivingError, QuadratureError, ArithmeticError) as exc:
            log.warning("omega=%g failed: %s", om, exc)
            d = {"omega": om, "status": "error", "message": str(exc), "bracket_low": math.nan,
                 "bracket_high": math.nan, "refined_estimate": math.nan, "oracle_zero": math.nan,
                 "deviation": math.nan}
        failed |= d["status"] != "ok"
        reports.append(d)
        rows.append([om, d["bracket_low"], d["bracket_high"], d["refined_estimate"], d["oracle_zero"],
                     d["deviation"], d["status"], d["message"]])
        print(f"omega={om:g} estimate={d['refined_estimate']:.6f} status={d['status']}")
    cols = ["omega", "bracket_low", "bracket_high", "refined_estimate", "oracle_zero", "deviation", "status",
            "message"]
    path = records.write_table(_path(cfg, "omega_sweep.csv"), "omega_sweep", cfg.metadata(), cols, rows)
    print(f"wrote {path}")
    return EXIT_NUMERIC if failed else EXIT_OK


def oracle_table(cfg: RunConfig):
    """(value rows, root rows) over the configured energy range."""
    if cfg.e_end < cfg.e_start:
        return [], []
    fn = cdt.oracle_function(cfg.target)
    grid = cdt.energy_grid(cfg.e_start, cfg.e_end, cfg.e_step)
    vals = [fn(E) for E in grid]
    rows = [[E, v.value, v.est_error] for E, v in zip(grid, vals)]
    roots = []
    for lo, hi in sign_changes(grid, [v.value for v in vals]):
        lo, hi = float(lo), float(hi)
        root = lo if lo == hi else find_root(lambda x: fn(x).value, lo, hi)
        cross = math.nan
        if cfg.target is Target.POLYA and lo != hi:
            cross = find_root(bessel_k_crosscheck, lo, hi)
        roots.append([lo, hi, root, cross])
    return rows, roots


def cmd_oracle(cfg: RunConfig) -> int:
    rows, roots = oracle_table(cfg)
    meta = cfg.metadata()
    records.write_table(_path(cfg, "oracle.csv"), "oracle", meta, ["E", "value", "est_error"], rows)
    path = records.write_table(_path(cfg, "oracle_roots.csv"), "oracle_roots", meta,
                               ["bracket_low", "bracket_high", "root", "crosscheck_root"], roots)
    for lo, hi, root, cross in roots:
        extra = "" if math.isnan(cross) else f" crosscheck={cross:.10f}"
        print(f"root in [{lo:g}, {hi:g}]: {root:.10f}{extra}")
    print(f"{len(rows)} samples, {len(roots)} roots; wrote {path}")
    return EXIT_OK


def cmd_confirm(cfg: RunConfig) -> int:
    E = cfg.E
    if E is None:
        E = cdt.oracle_zero(cfg.target, cfg.e_start, cfg.e_end)
        if not math.isfinite(E):
            raise ConfigError("no oracle zero in the window; pass --e")
    res = cdt.confirm_cdt(cfg.target, E, cfg.omega, cfg.periods, cfg.sim(), shots=cfg.shot_model())
    meta = {**cfg.metadata(), "E": E}
    m = res.series[:, 0]
    rows = np.column_stack([m, records.lab_time_ms(m, cfg.j_lab_hz), res.series[:, 1:]])
    path = records.write_table(_path(cfg, "confirm.csv"), "confirm", meta,
                               ["m", "t_lab_ms", "p_0", "p_plus", "p_i"],
                               ([int(r[0]), *r[1:]] for r in rows))
    summary = {"E": E, "omega": cfg.omega, "periods": cfg.periods, "frozen": res.frozen,
               "threshold": res.threshold, **{f"max_dev_{k}": v for k, v in res.max_deviation.items()}}
    records.write_report(_path(cfg, "confirm"), meta, summary, kind="confirmation")
    sys.stdout.write(records.report_text(summary))
    print(f"wrote {path}")
    return EXIT_OK


HANDLERS = {
    "waveform": cmd_waveform,
    "scan": cmd_scan,
    "refine": cmd_refine,
    "omega-sweep": cmd_omega_sweep,
    "oracle": cmd_oracle,
    "confirm": cmd_confirm,
}


# ---- argument parsing ---------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags override it")
    common.add_argument("--target", choices=[t.value for t in Target])
    common.add_argument("--e-start", dest="e_start", type=float)
    common.add_argument("--e-end", dest="e_end", type=float)
    common.add_argument("--e-step", dest="e_step", type=float)
    common.add_argument("--e", dest="E", type=float, help="single energy (waveform, confirm)")
    common.add_argument("--omega", type=float)
    common.add_argument("--omegas", help="comma-separated list (waveform, omega-sweep)")
    common.add_argument("--periods", type=int)
    common.add_argument("--shots", type=int, help="repetitions per point; enables shot noise")
    common.add_argument("--exact", action="store_true", help="exact probabilities (default)")
    common.add_argument("--fidelity", type=float, help="symmetric readout fidelity")
    common.add_argument("--no-spam", dest="spam", action="store_const", const=False,
                        help="sample without readout flips (shots mode)")
    common.add_argument("--seed", type=int)
    common.add_argument("--steps", type=int, help="time steps per unit of omega")
    common.add_argument("--workers", type=int, help="processes for the energy grid")
    common.add_argument("--samples", type=int, help="waveform samples per period")
    common.add_argument("--j-lab-hz", dest="j_lab_hz", type=float, help="lab tunneling rate for time columns")
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="riemann-cdt", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "waveform": "sample the driving field and its phase over one period",
        "scan": "coarse energy scan with the sum of residuals",
        "refine": "fine scan and interpolated zero",
        "omega-sweep": "refined zero for several scale factors",
        "oracle": "tabulate the reference function and its roots",
        "confirm": "check that all three bases stay frozen",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
        return HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except records.OutputError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DrivingError, QuadratureError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
