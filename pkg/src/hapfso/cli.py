"""Command-line entry point: ``hapfso <command> [options]``.

Commands emit CSV (default) or JSON. CSV output starts with a comment line
recording the package version, config hash and seed, then a header row.
Exit status: 0 success, 1 failed validation or undefined closed form,
2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import warnings
from contextlib import contextmanager
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .atmosphere import cn2_at
from .channel import ParameterRegionError, ValidityWarning, aoa_floor, channel_pdf_smooth
from .config import ConfigError, RunConfig, load
from .montecarlo import SimConfigError, simulate
from .optimize import mean_snr, optimize_beam_waist, optimize_fov, zenith_budget
from .pointing import DegenerateJitterError
from .validate import run_checks

log = logging.getLogger("hapfso")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "nan" if math.isnan(x) else format(float(x), ".10g")
    return str(x)


def _provenance(cfg: RunConfig, command: str) -> dict:
    return {"artifact_version": __version__, "command": command,
            "config_hash": cfg.config_hash, "seed": cfg.sim.seed}


def render_csv(cfg: RunConfig, command: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    p = _provenance(cfg, command)
    buf = io.StringIO()
    buf.write(f"# hapfso {p['artifact_version']} command={command} "
              f"config_hash={p['config_hash']} seed={p['seed']}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_json(cfg: RunConfig, command: str, payload: dict) -> str:
    def clean(o):
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        if isinstance(o, (np.floating, float)):
            f = float(o)
            return f if math.isfinite(f) else None
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.bool_):
            return bool(o)
        return o
    doc = {"provenance": _provenance(cfg, command), **clean(payload)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _table(cfg, args, header, rows) -> str:
    if args.format == "json":
        return render_json(cfg, args.command, {"columns": list(header),
                                                "rows": [list(r) for r in rows]})
    return render_csv(cfg, args.command, header, rows)


@contextmanager
def _quiet_validity():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        yield


def cmd_profile(cfg: RunConfig, args) -> tuple[str, int]:
    top = args.max_altitude_m or cfg.design.geometry.hap_altitude_m
    alt = np.geomspace(1.0, top, args.points)
    rows = [(a, float(cn2_at(a, cfg.design.atmosphere))) for a in alt]
    return _table(cfg, args, ("altitude_m", "cn2"), rows), EXIT_OK


def cmd_outage(cfg: RunConfig, args) -> tuple[str, int]:
    design = cfg.design
    p_grid = np.arange(args.p_t_min_dbm, args.p_t_max_dbm + 0.5 * args.p_t_step_db, args.p_t_step_db)
    d = design.derive()
    floor = float(aoa_floor(design.theta_fov_rad, design.sigma_o_rad))
    mc = None
    if args.mc:
        thr = d.h_th * 10 ** ((design.p_t_dbm - p_grid) / 10)
        mc = simulate(design, cfg.sim, thresholds=thr, derived=d)
    rows = []
    for i, p in enumerate(p_grid):
        with _quiet_validity():
            cf = design.replace(p_t_dbm=float(p)).outage()
        row = [float(p), cf]
        if mc is not None:
            pm = float(mc.outage_curve[i])
            row += [pm, 1.96 * math.sqrt(pm * (1 - pm) / mc.n_trials)]
        else:
            row += [math.nan, math.nan]
        row += [floor, cf <= floor * (1 + 1e-9)]
        rows.append(row)
    header = ("p_t_dbm", "p_out_closed_form", "p_out_mc", "mc_ci", "aoa_floor", "floor_limited")
    return _table(cfg, args, header, rows), EXIT_OK


def cmd_optimize(cfg: RunConfig, args) -> tuple[str, int]:
    mc = cfg.sim if args.mc else None
    if args.variable == "theta_fov":
        rep = optimize_fov(cfg.design, mc=mc)
    else:
        rep = optimize_beam_waist(cfg.design, mc=mc)
    if args.format == "csv":
        rows = [(x, math.exp(v) if math.isfinite(v) else math.nan) for x, v in rep.trace]
        return render_csv(cfg, args.command, (args.variable, "objective"), rows), EXIT_OK
    payload = rep.to_dict()
    payload["trace"] = [{"x": x, "log_objective": v} for x, v in rep.trace]
    return render_json(cfg, args.command, payload), EXIT_OK


def cmd_validate(cfg: RunConfig, args) -> tuple[str, int]:
    report = run_checks(cfg.design, cfg.sim, c1_scale=args.corrupt_c1)
    for c in report["checks"]:
        if not c["passed"]:
            log.error("check %s failed: expected %s, observed %.6g", c["name"], c["expected"],
                      c["observed"])
    code = EXIT_OK if report["passed"] else EXIT_FAIL
    if args.format == "csv":
        rows = [(c["name"], c["passed"], c["expected"], c["observed"], c["detail"])
                for c in report["checks"]]
        return render_csv(cfg, args.command, ("check", "passed", "expected", "observed", "detail"),
                          rows), code
    return render_json(cfg, args.command, report), code


def cmd_pdf(cfg: RunConfig, args) -> tuple[str, int]:
    design = cfg.design
    d = design.derive()
    if d.pc is None:
        raise DegenerateJitterError("sigma_r = 0: the channel density has no power-law part")
    if args.mc:
        res = simulate(design, cfg.sim, derived=d)
        h, dens = res.density()
    else:
        peak = d.h_al * d.pc.c1
        h, dens = np.geomspace(peak * 1e-6, peak, args.points), None
    closed = channel_pdf_smooth(d.model, d.pc, d.h_al, design.theta_fov_rad, design.sigma_o_rad, h)
    mc_col = dens if dens is not None else np.full(len(h), math.nan)
    rows = list(zip(h, closed, mc_col))
    return _table(cfg, args, ("h", "pdf_closed_form", "pdf_mc"), rows), EXIT_OK


def cmd_snr(cfg: RunConfig, args) -> tuple[str, int]:
    design = cfg.design
    ws = np.linspace(args.w_z_min_m, args.w_z_max_m, args.points)
    rows = []
    for w in ws:
        if args.mc:
            val = mean_snr(design, float(w), method="mc", mc=cfg.sim)
        else:
            val = mean_snr(design, float(w), method="analytic")
        rows.append((float(w), val, 10 * math.log10(val) if val > 0 else -math.inf))
    return _table(cfg, args, ("w_z_m", "mean_snr", "mean_snr_db"), rows), EXIT_OK


def cmd_budget(cfg: RunConfig, args) -> tuple[str, int]:
    zeniths = [float(z) for z in args.zeniths_deg.split(",")]
    with _quiet_validity():
        rows = zenith_budget(cfg.design, zeniths, args.target, optimize=not args.fixed_design)
    table = [(r.zenith_deg, r.feasible, r.required_p_t_dbm, r.w_z_m, r.theta_fov_rad, r.outage)
             for r in rows]
    header = ("zenith_deg", "feasible", "p_t_dbm", "w_z_m", "theta_fov_rad", "p_out")
    return _table(cfg, args, header, table), EXIT_OK


COMMANDS = {
    "profile": cmd_profile,
    "outage": cmd_outage,
    "optimize": cmd_optimize,
    "validate": cmd_validate,
    "pdf": cmd_pdf,
    "snr": cmd_snr,
    "budget": cmd_budget,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI run configuration")
    common.add_argument("--profile", default="table1", help="named default profile (default: table1)")
    common.add_argument("--seed", type=int, help="override [simulation] seed")
    common.add_argument("--trials", type=int, help="override [simulation] trials")
    common.add_argument("--mc", action=argparse.BooleanOptionalAction, default=None,
                        help="run the Monte-Carlo oracle alongside the closed form")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="hapfso", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hapfso {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", parents=[common], help="Cn2 profile over altitude")
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--max-altitude-m", type=float, default=None)

    p = sub.add_parser("outage", parents=[common], help="outage probability versus P_t")
    p.add_argument("--p-t-min-dbm", type=float, default=-30.0)
    p.add_argument("--p-t-max-dbm", type=float, default=30.0)
    p.add_argument("--p-t-step-db", type=float, default=2.0)

    p = sub.add_parser("optimize", parents=[common], help="optimize theta_FOV or w_Z")
    p.add_argument("--variable", choices=("theta_fov", "w_z"), default="theta_fov")

    p = sub.add_parser("validate", parents=[common], help="closed forms against oracles")
    p.add_argument("--corrupt-c1", type=float, default=1.0, help=argparse.SUPPRESS)

    p = sub.add_parser("pdf", parents=[common], help="channel density, closed form and MC")
    p.add_argument("--points", type=int, default=64)

    p = sub.add_parser("snr", parents=[common], help="average SNR versus w_Z")
    p.add_argument("--w-z-min-m", type=float, default=0.25)
    p.add_argument("--w-z-max-m", type=float, default=5.0)
    p.add_argument("--points", type=int, default=40)

    p = sub.add_parser("budget", parents=[common], help="required P_t versus zenith angle")
    p.add_argument("--zeniths-deg", default="10,20,30,40,50,60")
    p.add_argument("--target", type=float, default=1e-5)
    p.add_argument("--fixed-design", action="store_true",
                   help="keep the configured w_Z and theta_FOV instead of re-optimizing")
    return parser


# per-command defaults for flags shared by every command
_DEFAULT_MC = {"outage": True, "optimize": False, "validate": True, "pdf": True, "snr": True}
_DEFAULT_FORMAT = {"optimize": "json", "validate": "json"}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.mc is None:
        args.mc = _DEFAULT_MC.get(args.command, False)
    if args.format is None:
        args.format = _DEFAULT_FORMAT.get(args.command, "csv")
    try:
        cfg = load(args.config, args.profile).with_overrides(args.seed, args.trials)
    except (ConfigError, SimConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text, code = COMMANDS[args.command](cfg, args)
    except (SimConfigError, ValueError) as exc:
        if isinstance(exc, (ParameterRegionError, DegenerateJitterError)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
        if isinstance(exc, SimConfigError):
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        raise
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
