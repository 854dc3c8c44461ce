"""Sweep execution, CSV emission, and the figure-reproduction presets.

A sweep evaluates the requested metrics at every point of a one-variable
grid. Analytic values come from the quadrature metrics; Monte Carlo columns
(optional) come from one amortized sampling pass per metric, which is
bit-identical to per-point estimation at the same seed because channel gains
do not depend on the swept SNRs or rates.

Presets encode the numerical-results figures:

* fig2 — external SOP of each user vs its own average SNR (0..20 dB), curves
  for TAS (1x1), FAS 2x2 over 1 wl^2 and FAS 3x3 over 4 wl^2;
  eavesdropper 2x2 over 1 wl^2 at 0 dB.
* fig3 — internal SOP of the near user vs its SNR, far-user curves at
  {-5, 0, 5} dB (legend values are not in the text; documented choice).
* fig4 — SOP vs target secrecy rate (0..3 bit), all nodes 2x2 over 1 wl^2,
  SNRs pinned at 15/10/0 dB (documented choice).
* fig5 — external ASC of each user vs its own SNR (0..30 dB), same curve
  family as fig2.
* fig6 — internal ASC of the near user vs its SNR, far-user curves at
  {-5, 0, 5} dB.

Per curve one CSV is emitted; every value is reproducible bit-for-bit from
(config, seed), whatever the worker count.
"""

from __future__ import annotations

import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .channel import NodeId, linear_to_db, square_grid_geometry, tas_geometry
from .config import ConfigError, McSpec, RunConfig, SweepSpec, build_distributions, build_scenario, default_geometry
from .metrics import METRIC_FUNCTIONS, MetricResult
from .montecarlo import MonteCarloEstimate, estimate_metric_grid

__all__ = [
    "SweepRow",
    "PresetRun",
    "run_sweep",
    "emit_csv",
    "preset_runs",
    "PRESET_NAMES",
]

PRESET_NAMES = ("fig2", "fig3", "fig4", "fig5", "fig6")
_SOP_METRICS = {"sop_ext_near": "ext_near", "sop_ext_far": "ext_far", "sop_int_near": "int_near"}
_ASC_METRICS = {"asc_ext_near": "ext_near", "asc_ext_far": "ext_far", "asc_int_near": "int_near"}


@dataclass
class SweepRow:
    index: int
    sweep_value: float
    sweep_value_db: float | None
    metrics: dict = field(default_factory=dict)      # name -> MetricResult
    mc: dict = field(default_factory=dict)           # name -> MonteCarloEstimate
    failed: bool = False
    failure: str = ""


def _point_overrides(spec: SweepSpec, value: float) -> dict:
    if spec.variable.startswith("snr"):
        linear = 10.0 ** (value / 10.0) if spec.scale == "dB" else value
        return {spec.variable: linear}
    if spec.variable == "beacon_dbm":
        return {"beacon_dbm": value}
    return {spec.variable: value}


def _eval_point(args):
    cfg, dists, metrics, idx, value = args
    spec = cfg.sweep
    row = SweepRow(
        index=idx,
        sweep_value=value,
        sweep_value_db=value if spec.scale == "dB" and spec.variable.startswith("snr") else None,
    )
    try:
        params, secrecy = build_scenario(cfg, dists, _point_overrides(spec, value))
        for name in metrics:
            row.metrics[name] = METRIC_FUNCTIONS[name](params, secrecy)
    except ArithmeticError as exc:  # keep the row, flag the failure
        row.failed = True
        row.failure = str(exc)
    return row


def run_sweep(cfg: RunConfig, metrics: list[str], workers: int = 1) -> list[SweepRow]:
    """Evaluate the configured sweep; rows come back in sweep order."""
    for name in metrics:
        if name not in METRIC_FUNCTIONS:
            raise ConfigError(f"unknown metric {name!r} (choose from {sorted(METRIC_FUNCTIONS)})")
    dists = build_distributions(cfg)
    values = cfg.sweep.values()
    jobs = [(cfg, dists, metrics, i, v) for i, v in enumerate(values)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_eval_point, jobs))
    else:
        rows = [_eval_point(j) for j in jobs]
    rows.sort(key=lambda r: r.index)

    if cfg.mc.enabled:
        entries = []
        for row in rows:
            params, secrecy = build_scenario(cfg, dists, _point_overrides(cfg.sweep, row.sweep_value))
            entries.append((params, secrecy))
        for name in metrics:
            kind = "sop" if name in _SOP_METRICS else "asc"
            key = _SOP_METRICS.get(name) or _ASC_METRICS[name]
            ests = estimate_metric_grid(key, kind, entries, cfg.mc.n_samples,
                                        cfg.mc.seed, cfg.mc.mode)
            for row, est in zip(rows, ests):
                row.mc[name] = est
    return rows


def _fmt(x: float, precision: int) -> str:
    return f"{x:.{precision}g}"


def emit_csv(rows: list[SweepRow], path: str, precision: int = 10) -> None:
    """Write sweep rows as UTF-8, LF-terminated CSV with a stable header."""
    if not rows:
        raise ConfigError("emit_csv needs at least one row")
    metrics = list(rows[0].metrics)
    with_db = rows[0].sweep_value_db is not None
    with_mc = bool(rows[0].mc)
    header = ["sweep_value_db" if with_db else "sweep_value"]
    for name in metrics:
        header.append(f"{name}_analytic")
        if with_mc:
            header.append(f"{name}_mc")
            header.append(f"{name}_mc_stderr")
    header += ["quad_order", "mvn_err_max", "clamped", "failed"]
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        cells = [_fmt(row.sweep_value, precision)]
        worst = 0.0
        clamped = False
        order = 0
        for name in metrics:
            res = row.metrics.get(name)
            if res is None:
                cells.append("nan")
            else:
                cells.append(_fmt(res.value, precision))
                worst = max(worst, res.embedded_cdf_error)
                clamped = clamped or res.clamped
                order = max(order, res.quadrature_order_used)
            if with_mc:
                est = row.mc.get(name)
                cells.append(_fmt(est.value, precision) if est else "nan")
                cells.append(_fmt(est.std_error, precision) if est else "nan")
        cells += [str(order), _fmt(worst, 3), "1" if clamped else "0", "1" if row.failed else "0"]
        buf.write(",".join(cells) + "\n")
    data = buf.getvalue()
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
    except OSError as exc:
        print(f"csv_write_error path={path} error={exc}", file=sys.stderr)
        raise


@dataclass(frozen=True)
class PresetRun:
    name: str            # e.g. "fig2_sop_ext_near_fas_n9_w4"
    config: RunConfig
    metrics: tuple


def _geometry_family():
    return (
        ("tas", tas_geometry()),
        ("fas_n4_w1", square_grid_geometry(4, 1.0)),
        ("fas_n9_w4", square_grid_geometry(9, 4.0)),
    )


def _with_geometry(cfg: RunConfig, user_geom, eve_geom=None) -> RunConfig:
    geometry = default_geometry()
    geometry[NodeId.NEAR_USER] = user_geom
    geometry[NodeId.FAR_USER] = user_geom
    if eve_geom is not None:
        geometry[NodeId.EAVESDROPPER] = eve_geom
    return replace(cfg, geometry=geometry)


def preset_runs(preset: str, base: RunConfig | None = None) -> list[PresetRun]:
    """Expand a figure preset into named runs (one CSV per run)."""
    if preset not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {preset!r} (choose from {PRESET_NAMES})")
    cfg0 = base if base is not None else RunConfig(geometry=default_geometry())
    runs: list[PresetRun] = []

    if preset in ("fig2", "fig5"):
        stop, points = (20.0, 9) if preset == "fig2" else (30.0, 11)
        near_metric, far_metric = (("sop_ext_near", "sop_ext_far") if preset == "fig2"
                                   else ("asc_ext_near", "asc_ext_far"))
        for label, geom in _geometry_family():
            cfg = _with_geometry(cfg0, geom)
            cfg = replace(cfg, snr_overrides_db={"snr_un": None, "snr_uf": None, "snr_e": 0.0},
                          secrecy=replace(cfg.secrecy, scenario="external"))
            for metric, var in ((near_metric, "snr_un"), (far_metric, "snr_uf")):
                swept = replace(cfg, sweep=SweepSpec(var, 0.0, stop, points, "dB"))
                runs.append(PresetRun(f"{preset}_{metric}_{label}", swept, (metric,)))
        return runs

    if preset in ("fig3", "fig6"):
        stop, points = (20.0, 9) if preset == "fig3" else (30.0, 11)
        metric = "sop_int_near" if preset == "fig3" else "asc_int_near"
        for uf_db in (-5.0, 0.0, 5.0):
            cfg = replace(
                cfg0,
                snr_overrides_db={"snr_un": None, "snr_uf": uf_db, "snr_e": None},
                secrecy=replace(cfg0.secrecy, scenario="internal"),
                sweep=SweepSpec("snr_un", 0.0, stop, points, "dB"),
            )
            tag = f"uf{int(uf_db):+d}db".replace("+", "p").replace("-", "m")
            runs.append(PresetRun(f"{preset}_{metric}_{tag}", cfg, (metric,)))
        return runs

    # fig4: SOP vs target secrecy rate, N_j = 4, W_j = 1 wl^2
    pinned = {"snr_un": 15.0, "snr_uf": 10.0, "snr_e": 0.0}
    for metric, var, scenario in (
        ("sop_ext_near", "rate_un", "external"),
        ("sop_ext_far", "rate_uf", "external"),
        ("sop_int_near", "rate_un", "internal"),
    ):
        cfg = replace(
            cfg0,
            snr_overrides_db=pinned,
            secrecy=replace(cfg0.secrecy, scenario=scenario),
            sweep=SweepSpec(var, 0.0, 3.0, 13, "linear"),
        )
        runs.append(PresetRun(f"fig4_{metric}", cfg, (metric,)))
    return runs
