"""Distributions of the equivalent channel gain at a FAS node.

The single-port equivalent gain is the product of two unit-mean exponential
gains (energy link times information link), giving

    F(g) = 1 - 2 sqrt(g) K1(2 sqrt(g)),      f(g) = 2 K0(2 sqrt(g)).

The best-port gain couples the per-port marginals through a Gaussian copula
with the port correlation matrix R:

    F_fas(g) = Phi_R(q, ..., q),   q = Phi^{-1}(F(g)),

evaluated by the randomized-QMC engine in :mod:`fas_secrecy.copula`.

Three density routes are exposed, because they genuinely differ for N > 1:

* ``pdf_fas`` — the copula-diagonal closed form
  ``f(g)^N * exp(-0.5 phi^T (R^-1 - I) phi) / sqrt(det R)``; this is the
  analytic form consumed literally by the published secrecy theorems, but it
  is *not* the derivative of ``cdf_fas`` and does not integrate to 1 for
  weakly correlated grids (the normalization defect is measured in the tests).
  ``paper_literal=True`` reproduces the printed marginal argument sqrt(2g)
  instead of the derivative-consistent 2 sqrt(g).
* ``pdf_fas_numeric`` — the true density: a common-random-numbers central
  difference of ``cdf_fas`` (both CDF calls share one lattice, one shift set
  and one variable ordering, so the QMC noise cancels in the difference).
* ``pdf_single_port`` — the N = 1 marginal, exact.

Everything is log-domain-safe up to the N = 9 presets and beyond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import FasGeometry, correlation_matrix
from .copula import (
    CorrelationMatrix,
    log_copula_density_factor,
    mvn_cdf_equicoordinate_batch,
    repair_and_factor,
)
from .special import (
    DomainError,
    bessel_k0_scaled,
    bessel_k1_scaled,
    log_bessel_k0,
    std_normal_quantile,
)

__all__ = [
    "FasGainDistribution",
    "make_distribution",
    "cdf_single_port",
    "pdf_single_port",
    "log_pdf_single_port",
    "quantile_single_port",
    "cdf_fas",
    "cdf_fas_batch",
    "pdf_fas",
    "log_pdf_fas",
    "pdf_fas_numeric",
    "pdf_fas_numeric_batch",
]

_FD_REL_STEP = 5e-4


def cdf_single_port(g: float) -> float:
    """CDF of the single-port equivalent gain; exactly 0 at g = 0."""
    if g < 0:
        raise DomainError(f"gain must be >= 0, got {g}")
    if g == 0.0:
        return 0.0
    x = 2.0 * math.sqrt(g)
    # x K1(x) -> 1 as x -> 0; the scaled form keeps the tail alive to g ~ 1e5
    t = x * bessel_k1_scaled(x) * math.exp(-x) if x < 700.0 else 0.0
    return max(0.0, 1.0 - t)


def pdf_single_port(g: float) -> float:
    """Density of the single-port gain, 2 K0(2 sqrt(g)); diverges (integrably) at 0."""
    if not g > 0:
        raise DomainError(f"pdf_single_port requires g > 0, got {g}")
    x = 2.0 * math.sqrt(g)
    if x > 700.0:
        return 0.0
    return 2.0 * bessel_k0_scaled(x) * math.exp(-x)


def log_pdf_single_port(g: float) -> float:
    """ln pdf_single_port(g), stable for large g."""
    if not g > 0:
        raise DomainError(f"log_pdf_single_port requires g > 0, got {g}")
    return math.log(2.0) + log_bessel_k0(2.0 * math.sqrt(g))


def quantile_single_port(u: float) -> float:
    """Inverse of cdf_single_port on [0, 1); Newton with bisection safeguard."""
    if not 0.0 <= u < 1.0:
        raise DomainError(f"quantile_single_port requires 0 <= u < 1, got {u}")
    if u == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while cdf_single_port(hi) < u:
        hi *= 2.0
        if hi > 1e9:
            return hi
    g = 0.5 * hi
    for _ in range(200):
        fg = cdf_single_port(g) - u
        if fg > 0:
            hi = g
        else:
            lo = g
        dg = pdf_single_port(g) if g > 0 else math.inf
        step = fg / dg if dg > 0 else 0.0
        nxt = g - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - g) <= 1e-14 * max(g, 1e-300):
            return nxt
        g = nxt
    return g


@dataclass(frozen=True)
class FasGainDistribution:
    """Best-port gain law of one node: geometry plus its repaired copula matrix."""

    geometry: FasGeometry
    R: CorrelationMatrix
    cdf_accuracy: float = 1e-5
    seed: int = 0
    mvn_max_points: int = 1 << 14

    @property
    def n_ports(self) -> int:
        return self.geometry.total_ports


def make_distribution(
    geometry: FasGeometry,
    cdf_accuracy: float = 1e-5,
    seed: int = 0,
    mvn_max_points: int = 1 << 14,
) -> FasGainDistribution:
    """Build the node distribution: correlation matrix -> repair -> factor."""
    R = repair_and_factor(correlation_matrix(geometry))
    return FasGainDistribution(geometry, R, cdf_accuracy, seed, mvn_max_points)


def cdf_fas_batch(gs, d: FasGainDistribution):
    """(probabilities, error_estimates, accuracy_reached) for an array of gains."""
    gs = np.asarray(gs, dtype=float)
    bounds = np.array([std_normal_quantile(cdf_single_port(float(g))) for g in gs.ravel()])
    p, e, ok = mvn_cdf_equicoordinate_batch(
        bounds, d.R, d.cdf_accuracy, d.seed, d.mvn_max_points)
    return p.reshape(gs.shape), e.reshape(gs.shape), ok


def cdf_fas(g: float, d: FasGainDistribution) -> tuple[float, float]:
    """CDF of the best-port gain with its MVN error estimate."""
    p, e, _ = cdf_fas_batch(np.array([g]), d)
    return float(p[0]), float(e[0])


def log_pdf_fas(g: float, d: FasGainDistribution, paper_literal: bool = False) -> float:
    """ln of the copula-diagonal density form (see module docstring)."""
    if not g > 0:
        raise DomainError(f"pdf_fas requires g > 0, got {g}")
    if paper_literal:
        arg = math.sqrt(2.0 * g)
        log_marginal = math.log(2.0) + log_bessel_k0(arg)
    else:
        log_marginal = log_pdf_single_port(g)
    x = std_normal_quantile(cdf_single_port(g))
    if not math.isfinite(x):
        return -math.inf
    return d.n_ports * log_marginal + log_copula_density_factor(x, d.R)


def pdf_fas(g: float, d: FasGainDistribution, paper_literal: bool = False) -> float:
    """Copula-diagonal density form (the published analytic expression)."""
    lg = log_pdf_fas(g, d, paper_literal)
    return math.exp(lg) if lg < 709.0 else math.inf


def pdf_fas_numeric_batch(gs, d: FasGainDistribution, rel_step: float = _FD_REL_STEP):
    """True density of the best-port gain at an array of positive gains.

    Central difference of ``cdf_fas`` with common random numbers: the low and
    high bounds are evaluated in a single batched QMC pass, sharing lattice
    points, shifts and variable ordering, so the difference error is of the
    same order as the individual CDF errors, not their quotient by 2h.

    Returns (pdf_values, worst_underlying_cdf_errors, accuracy_reached); the
    reported errors are the raw MVN CDF error estimates of the two sides.
    """
    gs = np.asarray(gs, dtype=float)
    flat = gs.ravel()
    if np.any(flat <= 0):
        raise DomainError("pdf_fas_numeric requires g > 0")
    h = rel_step * flat
    both = np.concatenate([flat - h, flat + h])
    p, e, ok = cdf_fas_batch(both, d)
    m = flat.size
    pdf = (p[m:] - p[:m]) / (2.0 * h)
    pdf = np.maximum(pdf, 0.0)
    err = np.maximum(e[m:], e[:m])
    return pdf.reshape(gs.shape), err.reshape(gs.shape), ok


def pdf_fas_numeric(g: float, d: FasGainDistribution, rel_step: float = _FD_REL_STEP) -> float:
    p, _, _ = pdf_fas_numeric_batch(np.array([g]), d, rel_step)
    return float(p[0])
