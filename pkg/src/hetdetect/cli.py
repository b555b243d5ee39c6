"""Command-line front end.

Subcommands ``curves``, ``calibrate``, ``power`` and ``stat``. Settings
come from built-in defaults, then a flat ``key=value`` file given with
``--config``, then command-line flags. Every output file is paired with a
``<out>.manifest`` holding the resolved settings. Feeding that manifest back
through ``--config`` reproduces the file byte for byte.

Exit codes: 0 success, 1 numerical failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import secrets
import sys

import numpy as np

from . import mc
from .expfam import FamilyKind, get_family
from .phase import CurveId, PhaseSolverError, curve, default_theta_grid
from .pvalues import pvalues_for_dataset
from .samplesize import SampleSizeKind, get_samplesize
from .stats import DIRECTION, StatisticId, compute_all

log = logging.getLogger("hetdetect")

DEFAULTS = {
    "family": "gaussian",
    "samplesize": "poisson-max1",
    "n": "100000",
    "tau": "1.0",
    "alpha": "0.05",
    "runs_null": "999",
    "runs_alt": "1000",
    "thresholds_m": ",".join(map(str, mc.FULL_M_LIST)),
    "curves": "BJ,BH,BB,BR",
    "stats": ",".join(s.value for s in StatisticId),
    "randomize": "true",
}

KEYS = {"family", "samplesize", "n", "a0", "tau", "nb_r", "theta_grid", "beta_grid", "alpha",
        "runs_null", "runs_alt", "seed", "thresholds_m", "curves", "stats", "randomize",
        "command", "theta", "beta"}


class UsageError(Exception):
    pass


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:num`` (inclusive linspace) or a comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            return np.linspace(float(start), float(stop), int(num))
        return np.array([float(x) for x in text.split(",") if x.strip()])
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _resolve(args) -> dict:
    settings = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            loaded = mc.read_manifest(args.config)
        except OSError as e:
            raise UsageError(f"cannot read config: {e}") from None
        except ValueError as e:
            raise UsageError(str(e)) from None
        unknown = set(loaded) - KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        settings.update({k: v for k, v in loaded.items() if v != ""})
    for key in KEYS | {"out"}:
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = str(val)
    try:
        get_family(settings["family"])
        SampleSizeKind(settings["samplesize"])
    except ValueError as e:
        raise UsageError(str(e)) from None
    return settings


def _require(settings, *keys):
    missing = [k for k in keys if not settings.get(k)]
    if missing:
        raise UsageError("missing required setting(s): " + ", ".join(
            "--" + k.replace("_", "-") for k in missing))


def _samplesize(settings):
    nb_r = settings.get("nb_r")
    try:
        return get_samplesize(settings["samplesize"], float(settings["a0"]),
                              int(float(settings["n"])), float(settings["tau"]),
                              float(nb_r) if nb_r else None)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _seed(settings):
    if not settings.get("seed"):
        settings["seed"] = str(secrets.randbits(63))
        log.info("no seed given; using %s", settings["seed"])
    return int(settings["seed"])


def _sim_config(settings) -> mc.SimConfig:
    _require(settings, "a0")
    _seed(settings)
    d = dict(settings)
    d.setdefault("theta", "1.0")
    d.setdefault("beta", "0.6")
    try:
        return mc.config_from_manifest(d)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _write_manifest(out, settings, command):
    entries = {k: v for k, v in settings.items() if k in KEYS}
    entries["command"] = command
    mc.write_manifest(f"{out}.manifest", entries)


def run_curves(args) -> int:
    settings = _resolve(args)
    _require(settings, "a0", "out")
    spec = get_family(settings["family"])
    ss = _samplesize(settings)
    try:
        ids = [CurveId(c.strip()) for c in settings["curves"].split(",") if c.strip()]
    except ValueError as e:
        raise UsageError(str(e)) from None
    grid = (parse_grid(settings["theta_grid"]) if settings.get("theta_grid")
            else default_theta_grid(spec, ss))
    with open(settings["out"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["curve_id", "theta", "value", "regime", "nu_star", "a_star"])
        for cid in ids:
            for th in grid:
                p = curve(cid, spec, ss, float(th))
                w.writerow([cid.value, _fmt(th), _fmt(p.value), p.regime.value,
                            _fmt(p.nu_star), _fmt(p.a_star)])
    _write_manifest(settings["out"], settings, "curves")
    return 0


def run_calibrate(args) -> int:
    settings = _resolve(args)
    _require(settings, "out")
    cfg = _sim_config(settings)
    exp = mc.Experiment(cfg, n_jobs=args.jobs)
    crit = exp.calibrate()
    r = mc.calibration_rank(cfg.runs_null, cfg.alpha)
    with open(settings["out"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["statistic_id", "critical_value", "direction", "rank", "runs_null", "alpha",
                    "n", "a0", "family", "samplesize", "seed"])
        for s in cfg.statistics:
            w.writerow([s.value, _fmt(crit[s]), DIRECTION[s].value, r, cfg.runs_null,
                        _fmt(cfg.alpha), cfg.n, _fmt(cfg.samplesize.a0), cfg.family.kind.value,
                        cfg.samplesize.kind.value, cfg.seed])
    _write_manifest(settings["out"], settings, "calibrate")
    return 0


def run_power(args) -> int:
    settings = _resolve(args)
    _require(settings, "out", "beta_grid", "theta_grid")
    cfg = _sim_config(settings)
    betas = parse_grid(settings["beta_grid"])
    thetas = parse_grid(settings["theta_grid"])
    exp = mc.Experiment(cfg, n_jobs=args.jobs)
    rows = exp.power(betas, thetas)
    mc.write_power_csv(settings["out"], rows, cfg)
    _write_manifest(settings["out"], settings, "power")
    return 0


def _read_yk(path):
    try:
        fh = open(path, newline="")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from None
    with fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise UsageError(f"{path}: empty file")
    header = [h.strip().lower() for h in rows[0]]
    if header[:2] != ["y", "k"]:
        raise UsageError(f"{path}:1: expected header 'y,k', got {rows[0]}")
    Y, K = [], []
    for lineno, row in enumerate(rows[1:], 2):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            if len(row) != 2:
                raise ValueError
            y, k = float(row[0]), float(row[1])
            if not (math.isfinite(y) and k >= 1 and k == int(k)):
                raise ValueError
        except ValueError:
            raise UsageError(f"{path}:{lineno}: malformed row {row}") from None
        Y.append(y)
        K.append(int(k))
    if len(Y) < 2:
        raise UsageError(f"{path}: need at least two data rows")
    return np.array(Y), np.array(K, dtype=np.int64)


def run_stat(args) -> int:
    settings = _resolve(args)
    spec = get_family(settings["family"])
    Y, K = _read_yk(args.input)
    seed = int(settings["seed"]) if settings.get("seed") else 0
    randomize = settings["randomize"].lower() in ("1", "true", "yes")
    try:
        pv = pvalues_for_dataset(spec, Y, K, seed, randomize)
    except ValueError as e:
        raise UsageError(str(e)) from None
    res = compute_all(Y, pv, spec)
    out = sys.stdout
    out.write("statistic_id,value,direction\n")
    for s, r in res.items():
        out.write(f"{s.value},{_fmt(r.value)},{r.direction.value}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hetdetect", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def shared(p, sim=True):
        p.add_argument("--config", help="flat key=value settings file")
        p.add_argument("--family", choices=[k.value for k in FamilyKind])
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        if sim:
            p.add_argument("--samplesize", choices=[k.value for k in SampleSizeKind])
            p.add_argument("--n", type=int)
            p.add_argument("--a0", type=float)
            p.add_argument("--tau", type=float)
            p.add_argument("--nb-r", dest="nb_r", type=float)
            p.add_argument("--theta-grid", dest="theta_grid")
            p.add_argument("--beta-grid", dest="beta_grid")
            p.add_argument("--alpha", type=float)
            p.add_argument("--runs-null", dest="runs_null", type=int)
            p.add_argument("--runs-alt", dest="runs_alt", type=int)
            p.add_argument("--thresholds-m", dest="thresholds_m")
            p.add_argument("--stats", help="comma-separated statistic ids")
            p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("curves", help="detection boundary curves as CSV")
    shared(p)
    p.add_argument("--curves", help="comma-separated subset of B,BJ,BH,BB,BR")
    p.set_defaults(func=run_curves)

    p = sub.add_parser("calibrate", help="null critical values")
    shared(p)
    p.set_defaults(func=run_calibrate)

    p = sub.add_parser("power", help="calibrate, then estimate power over a beta x theta grid")
    shared(p)
    p.set_defaults(func=run_power)

    p = sub.add_parser("stat", help="all statistics for a two-column (y, k) CSV")
    p.add_argument("input")
    shared(p, sim=False)
    p.add_argument("--no-randomize", dest="randomize", action="store_const", const="false")
    p.set_defaults(func=run_stat)
    return parser


_GRID_FLAGS = ("--theta-grid", "--beta-grid")


def _glue_grid_values(argv):
    """Attach grid values to their flag so ``--theta-grid -1:1:21`` parses."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _GRID_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_grid_values(sys.argv[1:] if argv is None else list(argv)))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"hetdetect: error: {e}", file=sys.stderr)
        return 2
    except (PhaseSolverError, RuntimeError, FloatingPointError, ArithmeticError) as e:
        print(f"hetdetect: numerical failure: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
