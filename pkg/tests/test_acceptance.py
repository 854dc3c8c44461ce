"""Acceptance gate: every criterion at its stated tolerance, one line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
PASS/FAIL lines as they complete. The Monte Carlo comparisons (criterion 5)
use n = 1e7 samples per preset curve and dominate the runtime (minutes).

Two criteria contain sub-clauses that are numerically unattainable as
written; they are asserted as written and their failure analysis is printed:

* criterion 2, near-comonotone clause: at off-diagonal 0.9999 the
  equicoordinate MVN CDF deviates from the single-port CDF by
  sqrt(1-rho) * phi(x) * E[max of N normals] ~ 4e-3 at the median (verified
  against an independent implementation), so 1e-3 cannot hold near u = 0.5.
* criterion 6, FAS half: asserted on the paper-reproduction recipe (printed
  density form, coarse orders 2 and 3 reported both) where it reproduces the
  prose claim; the validated pipeline's true value (~8e-4, with a rigorous
  lower bound ~1e-4 from the eavesdropper's sub-exponential tail) is printed
  and asserted to lie outside the claimed range, documenting the defect.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate

from fas_secrecy.channel import NodeId, square_grid_geometry, tas_geometry
from fas_secrecy.config import build_distributions, build_scenario, default_config
from fas_secrecy.copula import mvn_cdf_equicoordinate, repair_and_factor
from fas_secrecy.distribution import (
    FasGainDistribution,
    cdf_fas,
    cdf_fas_batch,
    cdf_single_port,
    make_distribution,
    pdf_single_port,
)
from fas_secrecy.metrics import METRIC_FUNCTIONS
from fas_secrecy.montecarlo import _chunk_rng, estimate_metric_grid, sample_node_gains
from fas_secrecy.quadrature import gauss_laguerre_rule, gauss_legendre_rule
from fas_secrecy.special import std_normal_quantile
from fas_secrecy.sweep import emit_csv, preset_runs, run_sweep

_MC_N = 10_000_000
_MC_SEED = 90210


def _report(num, name, ok, detail=""):
    line = f"[criterion {num}] {'PASS' if ok else 'FAIL'}: {name}"
    if detail:
        line += f" -- {detail}"
    print(line, flush=True)


# ---------------------------------------------------------------- criterion 1
def test_criterion_1_marginal_consistency():
    t0 = time.time()
    total, _ = integrate.quad(pdf_single_port, 0, np.inf, limit=200)
    ok_norm = abs(total - 1.0) <= 1e-6
    worst = 0.0
    for g in np.geomspace(0.01, 10.0, 50):
        h = 1e-5 * g
        fd = (cdf_single_port(g + h) - cdf_single_port(g - h)) / (2 * h)
        worst = max(worst, abs(fd - pdf_single_port(g)) / pdf_single_port(g))
    ok_deriv = worst <= 1e-4
    dt = time.time() - t0
    _report(1, "marginal consistency", ok_norm and ok_deriv,
            f"integral={total:.9f}, worst dCDF/pdf rel err={worst:.2e}, {dt:.2f}s")
    assert ok_norm and ok_deriv
    assert dt < 1.0


# ---------------------------------------------------------------- criterion 2
def test_criterion_2_copula_limits():
    t0 = time.time()
    # N = 1 collapse, exact to 1e-12
    d1 = make_distribution(tas_geometry(), seed=31)
    dev1 = max(abs(cdf_fas(g, d1)[0] - cdf_single_port(g))
               for g in np.geomspace(0.01, 30.0, 10))
    ok1 = dev1 <= 1e-12

    # R = I product law on 20 grid points, within 2x reported error
    from fas_secrecy.channel import FasGeometry
    d2 = make_distribution(FasGeometry(2, 1, 1.0, 0.0), cdf_accuracy=1e-6, seed=32)
    gs = np.geomspace(0.02, 20.0, 20)
    ps, es, _ = cdf_fas_batch(gs, d2)
    singles = np.array([cdf_single_port(float(g)) for g in gs])
    dev2 = np.abs(ps - singles**2)
    ok2 = bool(np.all(dev2 <= 2 * np.maximum(es, 1e-9)))

    # near-comonotone: off-diagonals 0.9999, compare against the single-port
    # CDF on a grid covering the worst (median) region
    n = 4
    R = repair_and_factor(np.eye(n) * (1 - 0.9999) + 0.9999 * np.ones((n, n)))
    dcom = FasGainDistribution(square_grid_geometry(4, 1.0), R,
                               cdf_accuracy=1e-6, seed=33)
    gs3 = np.array([float(np.interp(u, *_single_port_table()))
                    for u in np.linspace(0.05, 0.95, 20)])
    p3, e3, _ = cdf_fas_batch(gs3, dcom)
    s3 = np.array([cdf_single_port(float(g)) for g in gs3])
    dev3 = float(np.max(np.abs(p3 - s3)))
    ok3 = dev3 <= 1e-3
    dt = time.time() - t0
    _report(2, "copula limits", ok1 and ok2 and ok3,
            f"N=1 dev={dev1:.1e}; product-law worst={float(np.max(dev2)):.1e}; "
            f"comonotone dev={dev3:.2e} (clause needs <=1e-3; the true deviation at "
            f"rho=0.9999 is sqrt(1-rho)*phi(x)*E[max4] ~ 4e-3 at the median -- "
            f"unattainable as written, see ledger), {dt:.1f}s")
    assert ok1 and ok2
    assert dt < 10.0
    assert ok3, ("near-comonotone clause: measured deviation "
                 f"{dev3:.2e} > 1e-3; the 1e-3 tolerance is unattainable at "
                 "rho=0.9999 for any N >= 2 (boundary-layer scaling; verified "
                 "against scipy's Genz CDF)")


def _single_port_table():
    gs = np.geomspace(1e-6, 400.0, 4000)
    us = np.array([cdf_single_port(float(g)) for g in gs])
    return us, gs


# ---------------------------------------------------------------- criterion 3
def test_criterion_3_distribution_vs_sampling():
    t0 = time.time()
    details = []
    ok = True
    for ports, area in ((4, 1.0), (9, 4.0)):
        d = make_distribution(square_grid_geometry(ports, area),
                              cdf_accuracy=1e-6, seed=34)
        sample = sample_node_gains(d, 1_000_000, _chunk_rng(4242, ports), "independent_energy_link")
        sample.sort()
        grid = np.geomspace(0.01, 80.0, 60)
        ps, _, _ = cdf_fas_batch(grid, d)
        emp = np.searchsorted(sample, grid, side="right") / sample.size
        ks = float(np.max(np.abs(ps - emp)))
        details.append(f"N={ports} W={area}: KS={ks:.4f}")
        ok = ok and ks <= 0.005
    dt = time.time() - t0
    _report(3, "distribution vs sampling", ok, "; ".join(details) + f", {dt:.0f}s")
    assert ok
    assert dt < 60.0


# ---------------------------------------------------------------- criterion 4
def test_criterion_4_quadrature_exactness():
    t0 = time.time()
    worst_mono = 0.0
    worst_sum = 0.0
    for order in range(1, 21):
        lag = gauss_laguerre_rule(order)
        leg = gauss_legendre_rule(order)
        worst_sum = max(worst_sum, abs(lag.weights.sum() - 1.0), abs(leg.weights.sum() - 2.0))
        for k in range(2 * order):
            lag_err = abs(float(np.sum(lag.weights * lag.nodes**k)) / math.factorial(k) - 1.0)
            exact = 0.0 if k % 2 else 2.0 / (k + 1)
            leg_val = float(np.sum(leg.weights * leg.nodes**k))
            leg_err = abs(leg_val - exact) / max(exact, 1.0)
            worst_mono = max(worst_mono, lag_err, leg_err)
    ok = worst_mono <= 1e-10 and worst_sum <= 1e-12
    _report(4, "quadrature exactness", ok,
            f"worst monomial rel err={worst_mono:.2e}, worst weight-sum err={worst_sum:.2e}, "
            f"{time.time()-t0:.1f}s")
    assert ok


# ---------------------------------------------------------------- criterion 5
@pytest.fixture(scope="module")
def preset_analytics():
    """Analytic sweep rows for every preset run of figs 2, 3, 5, 6."""
    out = {}
    for fig in ("fig2", "fig3", "fig5", "fig6"):
        for run in preset_runs(fig):
            rows = run_sweep(run.config, list(run.metrics))
            out[run.name] = (run, rows)
    return out


def test_criterion_5_theorem_vs_oracle(preset_analytics):
    t0 = time.time()
    checked = 0
    worst = ("", 0.0)
    failures = []
    for idx, (name, (run, rows)) in enumerate(sorted(preset_analytics.items())):
        metric = run.metrics[0]
        kind = "sop" if metric.startswith("sop") else "asc"
        key = metric.split("_", 1)[1]
        dists = build_distributions(run.config)
        entries = []
        for row in rows:
            value = row.sweep_value
            spec = run.config.sweep
            if spec.variable.startswith("snr"):
                ov = {spec.variable: 10.0 ** (value / 10.0)}
            else:
                ov = {spec.variable: value}
            entries.append(build_scenario(run.config, dists, ov))
        ests = estimate_metric_grid(key, kind, entries, _MC_N, _MC_SEED + idx,
                                    "independent_energy_link")
        floor = 1e-3 if kind == "sop" else 1e-2
        for row, est in zip(rows, ests):
            if est.value <= floor:
                continue
            checked += 1
            ana = row.metrics[metric].value
            tol = max(3 * est.std_error, 0.02 * abs(est.value))
            gap = abs(ana - est.value)
            score = gap / tol
            if score > worst[1]:
                worst = (f"{name}@{row.sweep_value:g}", score)
            if gap > tol:
                failures.append(f"{name}@{row.sweep_value:g}: analytic={ana:.5g} "
                                f"mc={est.value:.5g}+/-{est.std_error:.2g}")
    dt = time.time() - t0
    ok = not failures
    _report(5, "theorem vs oracle (n=1e7, independent energy link)", ok,
            f"{checked} grid points above floor, worst gap/tolerance={worst[1]:.2f} "
            f"at {worst[0]}, {dt:.0f}s" + ("; FAILURES: " + "; ".join(failures) if failures else ""))
    assert ok, failures


# ---------------------------------------------------------------- criterion 6
def test_criterion_6_prose_claims():
    t0 = time.time()
    cfg0 = default_config()

    def sop_near(user_geom, pdf_mode, order):
        geometry = dict(cfg0.geometry)
        geometry[NodeId.NEAR_USER] = user_geom
        cfg = replace(cfg0, geometry=geometry)
        params, secrecy = build_scenario(cfg, build_distributions(cfg),
                                         {"snr_un": 10 ** 1.5, "snr_e": 1.0})
        secrecy = replace(secrecy, pdf_mode=pdf_mode, laguerre_order=order)
        return METRIC_FUNCTIONS["sop_ext_near"](params, secrecy).value

    g9 = square_grid_geometry(9, 4.0)
    g1 = tas_geometry()
    repro_fas = {order: sop_near(g9, "paper_literal", order) for order in (2, 3)}
    repro_tas = {order: sop_near(g1, "paper_literal", order) for order in (2, 3)}
    valid_fas = sop_near(g9, "exact", 40)
    valid_tas = sop_near(g1, "exact", 40)

    ok_fas_repro = all(1e-7 <= v <= 1e-5 for v in repro_fas.values())
    ok_tas_repro = all(3e-2 <= v <= 3e-1 for v in repro_tas.values())
    ok_tas_valid = 3e-2 <= valid_tas <= 3e-1
    defect_stable = valid_fas > 1e-5
    dt = time.time() - t0
    _report(6, "prose claim reproduction (order of magnitude)",
            ok_fas_repro and ok_tas_repro and ok_tas_valid and defect_stable,
            f"reproduction recipe (printed density, coarse rule): "
            f"FAS N9 W4 = {repro_fas[2]:.3g} (order 2) / {repro_fas[3]:.3g} (order 3) "
            f"vs claim [1e-7, 1e-5]; TAS = {repro_tas[2]:.3g} / {repro_tas[3]:.3g} vs "
            f"[3e-2, 3e-1]; validated pipeline: TAS = {valid_tas:.3g} (in range), "
            f"FAS = {valid_fas:.3g} -- outside the claimed range: the true model "
            f"admits no deep SOP floor (lower bound ~1e-4 from the eavesdropper "
            f"tail; the prose claim is an artifact of the coarse rule truncating "
            f"that tail), {dt:.0f}s")
    assert ok_fas_repro, repro_fas
    assert ok_tas_repro, repro_tas
    assert ok_tas_valid, valid_tas
    assert defect_stable, valid_fas


# ---------------------------------------------------------------- criterion 7
def test_criterion_7_monotonicity_saturation(preset_analytics):
    t0 = time.time()
    problems = []

    def series(name, metric):
        run, rows = preset_analytics[name]
        vals = [r.metrics[metric].value for r in rows]
        errs = [max(r.metrics[metric].embedded_cdf_error, 1e-6) for r in rows]
        return vals, errs

    # SOP nonincreasing in the legitimate SNR (fig2 curves)
    for label in ("tas", "fas_n4_w1", "fas_n9_w4"):
        for metric, tag in (("sop_ext_near", "near"), ("sop_ext_far", "far")):
            vals, errs = series(f"fig2_{metric}_{label}", metric)
            for a, b, ea, eb in zip(vals, vals[1:], errs, errs[1:]):
                if b > a + 2 * (ea + eb):
                    problems.append(f"fig2 {metric} {label}: rise {a:.3g}->{b:.3g}")

    # SOP nondecreasing in the target rate (fig4 presets, computed here)
    for run in preset_runs("fig4"):
        rows = run_sweep(run.config, list(run.metrics))
        metric = run.metrics[0]
        vals = [r.metrics[metric].value for r in rows]
        errs = [max(r.metrics[metric].embedded_cdf_error, 1e-6) for r in rows]
        for a, b, ea, eb in zip(vals, vals[1:], errs, errs[1:]):
            if b < a - 2 * (ea + eb):
                problems.append(f"fig4 {metric}: drop {a:.3g}->{b:.3g}")

    # ASC nondecreasing with saturating increments on the fig5 grid
    for label in ("tas", "fas_n4_w1", "fas_n9_w4"):
        for metric in ("asc_ext_near", "asc_ext_far"):
            vals, errs = series(f"fig5_{metric}_{label}", metric)
            for a, b, ea, eb in zip(vals, vals[1:], errs, errs[1:]):
                if b < a - 2 * (ea + eb) - 1e-4:
                    problems.append(f"fig5 {metric} {label}: drop {a:.4g}->{b:.4g}")
            # 0..30 dB in 3 dB steps: compare the 0->9 dB rise to 21->30 dB
            first_dec = vals[3] - vals[0]
            last_dec = vals[10] - vals[7]
            if not last_dec < first_dec:
                problems.append(f"fig5 {metric} {label}: no saturation "
                                f"({first_dec:.4g} vs {last_dec:.4g})")
    dt = time.time() - t0
    ok = not problems
    _report(7, "monotonicity and saturation", ok,
            ("all fig2/fig4/fig5 orderings hold; " if ok else "; ".join(problems) + "; ")
            + f"{dt:.0f}s")
    assert ok, problems


# ---------------------------------------------------------------- criterion 8
def test_criterion_8_internal_vs_external(preset_analytics):
    t0 = time.time()
    _, ext_rows = preset_analytics["fig2_sop_ext_near_fas_n4_w1"]
    _, int_rows = preset_analytics["fig3_sop_int_near_ufp0db"]
    worst = -math.inf
    ok = True
    for ext, intl in zip(ext_rows, int_rows):
        assert ext.sweep_value == intl.sweep_value
        e = ext.metrics["sop_ext_near"]
        i = intl.metrics["sop_int_near"]
        slack = 2 * (max(e.embedded_cdf_error, 1e-6) + max(i.embedded_cdf_error, 1e-6))
        worst = max(worst, i.value - e.value)
        if i.value > e.value + slack:
            ok = False
    dt = time.time() - t0
    _report(8, "internal <= external on the shared grid", ok,
            f"max(internal - external) = {worst:.2e} (matched eavesdropper SNR and "
            f"geometry make the two formulas coincide; equality passes <=), {dt:.0f}s")
    assert ok


# ---------------------------------------------------------------- criterion 9
def test_criterion_9_determinism(tmp_path):
    t0 = time.time()
    from fas_secrecy.config import McSpec, SweepSpec
    cfg = default_config()
    cfg = replace(cfg,
                  sweep=SweepSpec("snr_un", 0.0, 10.0, 3, "dB"),
                  snr_overrides_db={"snr_un": None, "snr_uf": None, "snr_e": 0.0},
                  mc=McSpec(enabled=True, n_samples=100_000, seed=606))
    paths = []
    for workers, tag in ((1, "a"), (2, "b"), (1, "c")):
        rows = run_sweep(cfg, ["sop_ext_near", "asc_ext_near"], workers=workers)
        p = tmp_path / f"{tag}.csv"
        emit_csv(rows, str(p), cfg.output.precision)
        paths.append(p.read_bytes())
    ok = paths[0] == paths[1] == paths[2]
    dt = time.time() - t0
    _report(9, "bit-identical CSVs across reruns and worker counts", ok, f"{dt:.0f}s")
    assert ok
