"""Command-line front end.

Subcommands::

    sop-ext     external-eavesdropping SOP of one or both users at a point
    sop-int     internal-eavesdropping SOP of the near user at a point
    asc-ext     external-eavesdropping ASC of one or both users at a point
    asc-int     internal-eavesdropping ASC of the near user at a point
    sweep       run a configured sweep or a figure preset, emitting CSV
    mc-validate compare the analytic metrics against the Monte Carlo oracle
    quad-table  print quadrature nodes/weights as CSV
    dist-table  tabulate the gain CDF/PDF of one node as CSV

Exit codes: 0 success, 2 validation/configuration error, 3 numerical failure.
Diagnostics go to stderr as key=value lines; results go to stdout. The
default seed can be overridden with the FAS_SECRECY_SEED environment
variable; explicit --seed flags win over the environment.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from . import __version__
from .channel import NodeId, ValidationError, linear_to_db
from .config import (
    SEED_ENV_VAR,
    ConfigError,
    RunConfig,
    build_distributions,
    build_scenario,
    default_config,
    load_config,
)
from .copula import NumericalError
from .distribution import cdf_fas, pdf_fas, pdf_fas_numeric
from .metrics import METRIC_FUNCTIONS
from .montecarlo import MODES as MC_MODES
from .montecarlo import estimate_asc, estimate_sop
from .quadrature import ConfigurationError, EvaluationError, gauss_laguerre_rule, gauss_legendre_rule
from .special import DomainError
from .sweep import PRESET_NAMES, PresetRun, emit_csv, preset_runs, run_sweep

_EXIT_VALIDATION = 2
_EXIT_NUMERICAL = 3


def _diag(**kv):
    print(" ".join(f"{k}={v}" for k, v in kv.items()), file=sys.stderr)


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else default_config()
    secrecy = cfg.secrecy
    if getattr(args, "pdf_mode", None):
        secrecy = replace(secrecy, pdf_mode=args.pdf_mode.replace("-", "_"))
    if getattr(args, "paper_literal_pdf", False):
        secrecy = replace(secrecy, pdf_mode="paper_literal")
    if getattr(args, "paper_literal_asc_far", False):
        secrecy = replace(secrecy, paper_literal_asc_far=True)
    if getattr(args, "quad_order", None):
        secrecy = replace(secrecy, laguerre_order=args.quad_order,
                          legendre_order=args.quad_order)
    cfg = replace(cfg, secrecy=secrecy)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, mvn=replace(cfg.mvn, seed=args.seed),
                      mc=replace(cfg.mc, seed=args.seed))
    return cfg


def _point_overrides(args) -> dict:
    ov = {}
    for flag, key in (("snr_un_db", "snr_un"), ("snr_uf_db", "snr_uf"), ("snr_e_db", "snr_e")):
        v = getattr(args, flag, None)
        if v is not None:
            ov[key] = 10.0 ** (v / 10.0)
    for key in ("rate_un", "rate_uf"):
        v = getattr(args, key, None)
        if v is not None:
            ov[key] = v
    return ov


def _point_metrics(args, scenario: str, names: list[str]) -> int:
    cfg = _load(args)
    cfg = replace(cfg, secrecy=replace(cfg.secrecy, scenario=scenario))
    params, secrecy = build_scenario(cfg, None, _point_overrides(args))
    _diag(snr_un_db=f"{linear_to_db(params.snr_un):.3f}",
          snr_uf_db=f"{linear_to_db(params.snr_uf):.3f}",
          snr_e_db=f"{linear_to_db(params.snr_e):.3f}",
          pdf_mode=secrecy.pdf_mode)
    for name in names:
        res = METRIC_FUNCTIONS[name](params, secrecy)
        print(f"{name} = {res.value:.10g}")
        _diag(metric=name, quad_order=res.quadrature_order_used,
              mvn_err_max=f"{res.embedded_cdf_error:.3g}", clamped=int(res.clamped))
    return 0


def _user_metrics(prefix: str, user: str) -> list[str]:
    if user == "near":
        return [f"{prefix}_near"]
    if user == "far":
        return [f"{prefix}_far"]
    return [f"{prefix}_near", f"{prefix}_far"]


def _cmd_sop_ext(args) -> int:
    return _point_metrics(args, "external", _user_metrics("sop_ext", args.user))


def _cmd_sop_int(args) -> int:
    return _point_metrics(args, "internal", ["sop_int_near"])


def _cmd_asc_ext(args) -> int:
    return _point_metrics(args, "external", _user_metrics("asc_ext", args.user))


def _cmd_asc_int(args) -> int:
    return _point_metrics(args, "internal", ["asc_int_near"])


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    if args.preset:
        runs = preset_runs(args.preset, cfg)
    else:
        if not args.config:
            raise ConfigError("sweep needs --preset or --config")
        metrics = args.metrics.split(",") if args.metrics else ["sop_ext_near"]
        runs = [PresetRun("sweep", cfg, tuple(metrics))]
    for run in runs:
        run_cfg = run.config
        if args.with_mc:
            run_cfg = replace(run_cfg, mc=replace(run_cfg.mc, enabled=True))
        if args.mc_samples:
            run_cfg = replace(run_cfg, mc=replace(run_cfg.mc, n_samples=args.mc_samples))
        rows = run_sweep(run_cfg, list(run.metrics), workers=args.workers)
        path = os.path.join(out_dir, f"{run.name}.csv")
        emit_csv(rows, path, run_cfg.output.precision)
        _diag(run=run.name, csv=path, points=len(rows),
              failed=sum(r.failed for r in rows))
        print(path)
    return 0


def _cmd_mc_validate(args) -> int:
    cfg = _load(args)
    scenario = "internal" if args.metric == "sop_int_near" or args.metric == "asc_int_near" else "external"
    cfg = replace(cfg, secrecy=replace(cfg.secrecy, scenario=scenario))
    params, secrecy = build_scenario(cfg, None, _point_overrides(args))
    res = METRIC_FUNCTIONS[args.metric](params, secrecy)
    key = args.metric.split("_", 1)[1]   # e.g. "sop_ext_near" -> "ext_near"
    est_fn = estimate_sop if args.metric.startswith("sop") else estimate_asc
    est = est_fn(key, params, secrecy, args.n, cfg.mc.seed, args.mode)
    gap = abs(res.value - est.value)
    sig = gap / est.std_error if est.std_error > 0 else float("inf")
    print(f"analytic  = {res.value:.10g}")
    print(f"montecarlo= {est.value:.10g} +/- {est.std_error:.3g} (n={est.n_samples}, mode={est.mode})")
    print(f"gap       = {gap:.3g} ({sig:.2f} standard errors)")
    _diag(metric=args.metric, sigmas=f"{sig:.2f}", mvn_err=f"{res.embedded_cdf_error:.3g}")
    return 0


def _cmd_quad_table(args) -> int:
    rule = gauss_laguerre_rule(args.order) if args.kind == "laguerre" else gauss_legendre_rule(args.order)
    out = sys.stdout if not args.out else open(args.out, "w", encoding="utf-8", newline="")
    try:
        out.write("index,node,weight,scaled_weight\n")
        for i, (x, w, sw) in enumerate(zip(rule.nodes, rule.weights, rule.scaled_weights), 1):
            out.write(f"{i},{x:.16g},{w:.16g},{sw:.16g}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _cmd_dist_table(args) -> int:
    cfg = _load(args)
    dists = build_distributions(cfg)
    node = {"near_user": NodeId.NEAR_USER, "far_user": NodeId.FAR_USER,
            "eavesdropper": NodeId.EAVESDROPPER}[args.node]
    d = dists[node]
    if args.gmin <= 0 or args.gmax <= args.gmin:
        raise ConfigError("need 0 < gmin < gmax")
    import numpy as np
    gs = np.geomspace(args.gmin, args.gmax, args.points)
    out = sys.stdout if not args.out else open(args.out, "w", encoding="utf-8", newline="")
    try:
        out.write("g,cdf,cdf_err,pdf_exact,pdf_copula_diagonal\n")
        for g in gs:
            c, e = cdf_fas(float(g), d)
            out.write(f"{g:.10g},{c:.10g},{e:.3g},{pdf_fas_numeric(float(g), d):.10g},"
                      f"{pdf_fas(float(g), d):.10g}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _add_point_flags(sp, rates=True):
    sp.add_argument("--config", help="JSON run configuration")
    sp.add_argument("--snr-un-db", type=float, dest="snr_un_db")
    sp.add_argument("--snr-uf-db", type=float, dest="snr_uf_db")
    sp.add_argument("--snr-e-db", type=float, dest="snr_e_db")
    if rates:
        sp.add_argument("--rate-un", type=float, dest="rate_un")
        sp.add_argument("--rate-uf", type=float, dest="rate_uf")
    sp.add_argument("--quad-order", type=int, dest="quad_order")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fas-secrecy",
        description="Secrecy metrics of a fluid-antenna-aided wireless-powered NOMA system",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--seed", type=int, help=f"override all seeds (also {SEED_ENV_VAR})")
    ap.add_argument("--pdf-mode", choices=["exact", "copula-diagonal", "paper-literal"],
                    help="density used inside the SOP quadratures (default exact)")
    ap.add_argument("--paper-literal-pdf", action="store_true",
                    help="shorthand for --pdf-mode paper-literal")
    ap.add_argument("--paper-literal-asc-far", action="store_true",
                    help="keep the printed e^psi factor in the far-user ASC")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn, user in (("sop-ext", _cmd_sop_ext, True), ("sop-int", _cmd_sop_int, False),
                           ("asc-ext", _cmd_asc_ext, True), ("asc-int", _cmd_asc_int, False)):
        sp = sub.add_parser(name)
        _add_point_flags(sp)
        if user:
            sp.add_argument("--user", choices=["near", "far", "both"], default="both")
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("sweep")
    sp.add_argument("--preset", choices=PRESET_NAMES)
    sp.add_argument("--config")
    sp.add_argument("--metrics", help="comma-separated metric names for --config sweeps")
    sp.add_argument("--with-mc", action="store_true")
    sp.add_argument("--mc-samples", type=int)
    sp.add_argument("--out-dir")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(fn=_cmd_sweep)

    sp = sub.add_parser("mc-validate")
    _add_point_flags(sp)
    sp.add_argument("--metric", choices=sorted(METRIC_FUNCTIONS), required=True)
    sp.add_argument("--n", type=int, default=1_000_000)
    sp.add_argument("--mode", choices=list(MC_MODES), default="independent_energy_link")
    sp.set_defaults(fn=_cmd_mc_validate)

    sp = sub.add_parser("quad-table")
    sp.add_argument("--kind", choices=["laguerre", "legendre"], required=True)
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_quad_table)

    sp = sub.add_parser("dist-table")
    sp.add_argument("--config")
    sp.add_argument("--node", choices=["near_user", "far_user", "eavesdropper"],
                    default="near_user")
    sp.add_argument("--gmin", type=float, default=1e-3)
    sp.add_argument("--gmax", type=float, default=50.0)
    sp.add_argument("--points", type=int, default=50)
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_dist_table)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValidationError, DomainError, ConfigurationError, FileNotFoundError) as exc:
        _diag(error="validation", detail=str(exc))
        return _EXIT_VALIDATION
    except (NumericalError, EvaluationError, ArithmeticError) as exc:
        _diag(error="numerical", detail=str(exc))
        return _EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
