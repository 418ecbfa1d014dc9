"""Command line interface.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .artifacts import emit_grid, emit_json, emit_plot, emit_polylines
from .boundaries import PLANES, diagram_grid, hex_thresholds, quasihex_thresholds
from .coefficients import compute_coefficients, response_vectors
from .config import RunConfig, build_system, dump_config, parse_config
from .errors import ConfigError, NumericalFailure, TuringStripesError
from .model import designed_example, klausmeier, klausmeier_turing_rainfall, linear_coeffs, verify_turing

__all__ = ["ENV_OUTPUT_DIR", "main", "run"]

ENV_OUTPUT_DIR = "TURINGSTRIPES_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

log = logging.getLogger("turingstripes")


def _plane_arg(text: str) -> str:
    plane = text.replace("-", "_")
    if plane not in PLANES:
        raise argparse.ArgumentTypeError(f"plane must be one of {[p.replace('_', '-') for p in PLANES]}")
    return plane


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="turingstripes", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON configuration file (comments allowed)")
    p.add_argument("--out", help=f"output directory (overridden by ${ENV_OUTPUT_DIR})")
    p.add_argument("--system", choices=("designed_example", "klausmeier"), help="preset system")
    p.add_argument("--epsilon", type=float, help="quadratic strength of the designed example")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command")

    sub.add_parser("verify", help="check the Turing conditions")
    c = sub.add_parser("coeffs", help="expansion coefficients and thresholds")
    c.add_argument("--q-scale", type=float, dest="q_scale")

    d = sub.add_parser("diagram", help="classify a parameter plane")
    d.add_argument("--plane", type=_plane_arg)
    d.add_argument("--x", type=float, nargs=3, metavar=("MIN", "MAX", "COUNT"))
    d.add_argument("--y", type=float, nargs=3, metavar=("MIN", "MAX", "COUNT"))
    for name in ("beta", "kappa-tilde", "q", "q-slope", "theta", "ell-tilde-square"):
        d.add_argument(f"--{name}", type=float, dest=name.replace("-", "_"))
    d.add_argument("--no-plot", action="store_true")

    o = sub.add_parser("oracle", help="convergence of lattice eigenvalues to the analytic blocks")
    o.add_argument("--scenario")
    o.add_argument("--eps-list", type=float, nargs="+", dest="eps_list")
    o.add_argument("--N", type=int)
    o.add_argument("--N-lat", type=int, dest="N_lat")

    k = sub.add_parser("calibrate", help="select the quadratic-coefficient convention")
    k.add_argument("--eps-list", type=float, nargs="+", dest="eps_list")
    k.add_argument("--N", type=int)
    k.add_argument("--N-lat", type=int, dest="N_lat")

    s = sub.add_parser("scan", help="brute-force stripe stability scan")
    s.add_argument("--model", choices=("klausmeier",))
    s.add_argument("--beta", type=float)
    s.add_argument("--kappa", type=float, nargs=3, metavar=("MIN", "MAX", "STEP"))
    s.add_argument("--a", type=float, nargs=3, metavar=("MIN", "MAX", "STEP"))
    s.add_argument("--N", type=int)
    s.add_argument("--N-lat", type=int, dest="N_lat")
    s.add_argument("--per-decade", type=int, dest="per_decade")
    s.add_argument("--workers", type=int)
    s.add_argument("--no-plot", action="store_true")
    return p


CLI_PARAMS = {
    "verify": (),
    "coeffs": ("q_scale",),
    "diagram": ("plane", "x", "y"),
    "oracle": ("scenario", "eps_list", "N", "N_lat"),
    "calibrate": ("eps_list", "N", "N_lat"),
    "scan": ("model", "beta", "kappa", "a", "N", "N_lat", "per_decade", "workers"),
}
FIXED_ARGS = ("beta", "kappa_tilde", "q", "q_slope", "theta", "ell_tilde_square")


def _config_from_args(args) -> RunConfig:
    if args.config:
        cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
        if args.command and args.command != cfg.command:
            raise ConfigError(f"configuration is for {cfg.command!r}, not {args.command!r}")
    elif args.command:
        cfg = RunConfig(args.command)
    else:
        raise ConfigError("no command given")
    params = dict(cfg.params)
    for key in CLI_PARAMS[cfg.command]:
        val = getattr(args, key, None)
        if val is not None:
            params[key] = list(val) if isinstance(val, list) else val
    if cfg.command == "diagram":
        fixed = dict(params.get("fixed", {}))
        for key in FIXED_ARGS:
            val = getattr(args, key, None)
            if val is not None:
                fixed[key] = val
        params["fixed"] = fixed
    if getattr(args, "no_plot", False):
        params["plot"] = False
    system, sys_params = cfg.system, dict(cfg.system_params)
    if args.system:
        system, sys_params = args.system, {}
    if args.epsilon is not None:
        if system != "designed_example":
            raise ConfigError("--epsilon applies to the designed example only")
        sys_params["epsilon"] = args.epsilon
    out = os.environ.get(ENV_OUTPUT_DIR) or args.out or cfg.output_dir
    # re-validate the merged document through the parser
    return parse_config(dump_config(RunConfig(cfg.command, system, sys_params, params, out)))


def _turing_system(cfg: RunConfig):
    """System at a Turing point: presets other than Klausmeier are used as given,
    Klausmeier is moved to its Turing rainfall."""
    if cfg.system == "klausmeier":
        m = cfg.system_params.get("m", 0.45)
        d = cfg.system_params.get("d", 500.0)
        return klausmeier(klausmeier_turing_rainfall(m, d), m, d)
    return build_system(cfg.system, cfg.system_params)


def _oracle_base(cfg: RunConfig):
    """O(1) quadratic profile for the eps-scaled oracle runs."""
    if cfg.system == "designed_example":
        return designed_example(1.0)
    return _turing_system(cfg)


def _cmd_verify(cfg, out):
    sys_ = build_system(cfg.system, cfg.system_params)
    rep = verify_turing(sys_, raise_on_failure=False)
    data = {k: (bool(v) if isinstance(v, (bool, np.bool_)) else v) for k, v in asdict(rep).items()}
    data["ok"] = bool(rep.ok)
    data["system"] = sys_.name
    emit_json(data, out / "verify.json")
    print(f"turing conditions: {'hold' if rep.ok else 'fail'} "
          f"({rep.trace_negative_det_positive}, {rep.critical_only_on_circle}, {rep.simple_root})")
    return EXIT_OK if rep.ok else EXIT_CONFIG


def _cmd_coeffs(cfg, out):
    sys_ = _turing_system(cfg)
    turing = linear_coeffs(sys_)
    coeffs = compute_coefficients(sys_, turing, q_scale=cfg.params.get("q_scale", 1.0))
    resp = response_vectors(sys_, turing)
    data = {"system": sys_.name, "linear": asdict(turing), "coefficients": asdict(coeffs),
            "q_eff": coeffs.q, "rho_beta_alt": resp["rho_beta_alt"], "rho_kappa_alt": resp["rho_kappa_alt"],
            "hex_thresholds": {k: v for k, v in hex_thresholds(coeffs, turing, 0.0, coeffs.q).items() if k != "H_tilde"}}
    try:
        data["quasihex_thresholds"] = asdict(quasihex_thresholds(coeffs, turing, 0.1, 0.0, coeffs.q, 1.0))
    except ConfigError as exc:
        data["quasihex_thresholds"] = str(exc)
    emit_json(data, out / "coeffs.json")
    print(f"kc={turing.kc:.12g} lambda_M={turing.lambda_M:.12g} rho_beta={turing.rho_beta:.12g} "
          f"rho_kappa={turing.rho_kappa:.12g} k0={coeffs.k0:.12g} rho_nl={coeffs.rho_nl:.12g} q={coeffs.q:.12g}")
    return EXIT_OK


def _cmd_diagram(cfg, out):
    sys_ = _turing_system(cfg)
    turing = linear_coeffs(sys_)
    coeffs = compute_coefficients(sys_, turing)
    p = cfg.params
    plane = p.get("plane", "kappa_alpha")
    x = p.get("x", [-0.3, 0.3, 121])
    y = p.get("y", [-0.2, 0.4, 121])
    grid = diagram_grid(coeffs, turing, plane, p.get("fixed", {}), x, y)
    stem = f"diagram_{plane}"
    emit_grid(grid, out / f"{stem}.csv")
    emit_polylines(grid, out / f"{stem}_boundaries.csv")
    if p.get("plot", True):
        emit_plot(grid, out / f"{stem}.svg")
    counts = {k: int(np.count_nonzero(v)) for k, v in grid.flags.items()}
    print(f"{plane}: {grid.shape[1]}x{grid.shape[0]} cells, " + ", ".join(f"{k}={v}" for k, v in counts.items()))
    return EXIT_OK


def _cmd_oracle(cfg, out):
    from .oracle.asymptotics import DEFAULT_EPS, compare_asymptotics

    p = cfg.params
    scenario = p.get("scenario", "hex")
    rep = compare_asymptotics(_oracle_base(cfg), scenario, p.get("eps_list", DEFAULT_EPS),
                              p.get("N", 32), p.get("N_lat", 8))
    data = {"scenario": rep.scenario, "eps": rep.eps, "errors": rep.errors, "orders": rep.orders,
            "translation": rep.translation, "min_order": rep.min_order, "passed": rep.passed,
            "labels": rep.labels, "analytic": rep.analytic, "oracle": rep.oracle}
    emit_json(data, out / f"oracle_{scenario}.json")
    print(f"{scenario}: min order {rep.min_order:.3f}, max translation {max(rep.translation):.2e} -> "
          f"{'PASS' if rep.passed else 'FAIL'}")
    return EXIT_OK if rep.passed else EXIT_NUMERICAL


def _cmd_calibrate(cfg, out):
    from .oracle.asymptotics import DEFAULT_EPS, calibrate_q_convention

    p = cfg.params
    base = _oracle_base(cfg)
    gamma, reports = calibrate_q_convention(base, p.get("eps_list", DEFAULT_EPS), p.get("N", 32),
                                            p.get("N_lat", 8), return_reports=True)
    data = {"gamma_cal": gamma,
            "candidates": {str(r.q_scale): {"min_order": r.min_order, "ambiguous": r.ambiguous,
                                            "passed": r.passed} for r in reports}}
    if cfg.system == "designed_example":
        eps = cfg.system_params.get("epsilon", 0.4)
        sys_ = build_system("designed_example", {"epsilon": eps})
        data["q_eff"] = compute_coefficients(sys_, q_scale=gamma).q
        data["epsilon"] = eps
    emit_json(data, out / "calibration.json")
    print(f"gamma_cal = {gamma}" + (f", q_eff = {data['q_eff']:.6g}" if "q_eff" in data else ""))
    return EXIT_OK


def _cmd_scan(cfg, out):
    from .oracle.klausmeier import (EllSweep, klausmeier_scan, region_components,
                                    rhombic_criticality_crossing)

    p = cfg.params
    m = cfg.system_params.get("m", 0.45) if cfg.system == "klausmeier" else 0.45
    d = cfg.system_params.get("d", 500.0) if cfg.system == "klausmeier" else 500.0
    beta = p.get("beta", 0.0)
    kap = tuple(p.get("kappa", [0.40, 0.50, 0.002]))
    a_ax = tuple(p.get("a", [2.69, 2.885, 0.005]))
    sweep = EllSweep(per_decade=p.get("per_decade", 64))
    scan = klausmeier_scan(kap, a_ax, beta, m, d, p.get("N", 64), p.get("N_lat", 6), sweep,
                           workers=p.get("workers", 1))
    grid = scan.to_diagram_grid()
    stem = f"scan_klausmeier_beta{beta:g}"
    extra = ("rectangle", "rectangle_finite", "rhomb")
    emit_grid(grid, out / f"{stem}.csv", extra_flags=extra)
    scan.write_log(out / f"{stem}.log.jsonl")
    if p.get("plot", True):
        emit_plot(grid, out / f"{stem}.svg", layers=("exists", "stable", "eckhaus", "rectangle", "rhomb"))
    flags = scan.flags()
    summary = {"beta": beta, "kc": scan.kc, "cells": int(scan.status.size),
               "existing": int(flags["exists"].sum()),
               "failed": int(sum(r["status"] != "ok" for r in scan.records)),
               "rhomb_components": region_components(flags["rhomb"], 4, MIN_COMPONENT)}
    try:
        cr = rhombic_criticality_crossing(scan, refine=False)
        summary["rhombic_crossing_estimate"] = {"kappa": cr.kappa, "a": cr.a}
    except ConfigError as exc:
        summary["rhombic_crossing_estimate"] = str(exc)
    emit_json(summary, out / f"{stem}_summary.json")
    print(", ".join(f"{k}={v}" for k, v in summary.items()))
    return EXIT_OK


MIN_COMPONENT = 3
COMMANDS = {"verify": _cmd_verify, "coeffs": _cmd_coeffs, "diagram": _cmd_diagram, "oracle": _cmd_oracle,
            "calibrate": _cmd_calibrate, "scan": _cmd_scan}


def run(cfg: RunConfig) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return COMMANDS[cfg.command](cfg, out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config_from_args(args)
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, TuringStripesError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
