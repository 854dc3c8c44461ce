"""Multivariate-normal machinery behind the Gaussian copula of port gains.

Three pieces:

* ``repair_and_factor`` — turns a raw port correlation matrix into a factored,
  numerically positive-definite ``CorrelationMatrix`` (escalating diagonal
  jitter, renormalized back to unit diagonal, Cholesky cached).
* ``mvn_cdf_equicoordinate`` — Phi_R(x, ..., x) by randomized quasi-Monte
  Carlo over the separation-of-variables (sequential conditioning) form, with
  greedy variable reordering, a Richtmyer lattice, tent periodization and
  independent Philox substreams per random shift. Returns the estimate and a
  99%-confidence error bound; deterministic for a fixed seed regardless of
  evaluation order. The estimator is multiplicative, so deep lower-tail values
  come out with small relative (not just absolute) error.
* ``copula_density_factor`` — the equicoordinate Gaussian copula density
  exp(-0.5 phi^T (R^-1 - I) phi) / sqrt(det R), computed through the
  triangular factor in log domain.

Batched variants evaluate many equicoordinate bounds in one lattice pass;
the secrecy quadratures lean on this heavily.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import ndtr, ndtri

from .special import std_normal_cdf

__all__ = [
    "NumericalError",
    "CorrelationMatrix",
    "repair_and_factor",
    "mvn_cdf_equicoordinate",
    "mvn_cdf_equicoordinate_batch",
    "copula_density_factor",
    "log_copula_density_factor",
]

_JITTER_START = 1e-10
_JITTER_MAX = 1e-4
_PRIMES = np.array([
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149,
    151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229,
    233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311, 313,
    317, 331, 337, 347, 349, 353, 359, 367, 373, 379, 383, 389, 397, 401, 409,
    419, 421, 431, 433, 439, 443, 449, 457, 461, 463, 467, 479, 487, 491, 499,
    503, 509, 521, 523, 541, 547, 557, 563, 569, 571, 577, 587, 593, 599, 601,
], dtype=float)
_MVN_SHIFTS = 8
_MVN_START_POINTS = 1 << 10
_MVN_DEFAULT_MAX_POINTS = 1 << 14
_UNIF_LO = 1e-300
_UNIF_HI = 1.0 - 1e-16


class NumericalError(ArithmeticError):
    """A linear-algebra or log-domain step left the representable range."""


@dataclass(frozen=True)
class CorrelationMatrix:
    """Repaired, factored port correlation matrix.

    ``entries`` is the (possibly jittered) matrix actually used downstream,
    ``lower_factor`` its Cholesky factor, ``log_det`` its log determinant and
    ``jitter`` the diagonal loading that was needed (0.0 for a healthy input).
    """

    dim: int
    entries: np.ndarray
    lower_factor: np.ndarray
    log_det: float
    jitter: float = 0.0

    def __post_init__(self):
        self.entries.setflags(write=False)
        self.lower_factor.setflags(write=False)

    @property
    def is_identity(self) -> bool:
        return bool(np.all(self.entries == np.eye(self.dim)))


def repair_and_factor(raw: np.ndarray) -> CorrelationMatrix:
    """Factor a symmetric unit-diagonal matrix, jittering if necessary.

    Jitter escalates tenfold from 1e-10; after loading, the matrix is
    renormalized to unit diagonal so it stays a correlation matrix.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
        raise NumericalError(f"expected a square matrix, got shape {raw.shape}")
    n = raw.shape[0]
    if not np.allclose(raw, raw.T, atol=1e-12):
        raise NumericalError("correlation matrix must be symmetric to 1e-12")
    if not np.allclose(np.diag(raw), 1.0, atol=1e-12):
        raise NumericalError("correlation matrix must have unit diagonal")

    lam = 0.0
    mat = raw
    while True:
        try:
            chol = np.linalg.cholesky(mat)
            if np.min(np.diag(chol)) > math.sqrt(_JITTER_START) * 0.1:
                break
            raise np.linalg.LinAlgError("pivot below jitter floor")
        except np.linalg.LinAlgError:
            lam = _JITTER_START if lam == 0.0 else lam * 10.0
            if lam > _JITTER_MAX:
                raise NumericalError(
                    f"matrix not factorizable even at jitter {_JITTER_MAX}") from None
            mat = (raw + lam * np.eye(n)) / (1.0 + lam)
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return CorrelationMatrix(n, mat, chol, log_det, lam)


def _reordered_cholesky(R: CorrelationMatrix, x: float) -> np.ndarray:
    """Greedy variable reordering (smallest conditional probability first).

    Standard Genz-style permuted Cholesky specialized to equal upper bounds:
    at each step pick the variable whose conditional upper bound is smallest,
    which minimizes the variance carried by the outer integration variables.
    Ties resolve to the lowest index, keeping the result deterministic.
    """
    n = R.dim
    c = R.entries.copy()
    L = np.zeros((n, n))
    y = np.zeros(n)
    order = np.arange(n)
    b = np.full(n, x)

    for k in range(n):
        # conditional bound for each remaining variable
        best, best_val = k, math.inf
        for i in range(k, n):
            denom = c[i, i] - np.dot(L[i, :k], L[i, :k])
            if denom <= 0:
                denom = 1e-14
            t = (b[i] - np.dot(L[i, :k], y[:k])) / math.sqrt(denom)
            if t < best_val - 1e-12:
                best, best_val = i, t
        if best != k:
            c[[k, best], :] = c[[best, k], :]
            c[:, [k, best]] = c[:, [best, k]]
            L[[k, best], :k] = L[[best, k], :k]
            order[[k, best]] = order[[best, k]]
        d2 = c[k, k] - np.dot(L[k, :k], L[k, :k])
        d = math.sqrt(max(d2, 1e-14))
        L[k, k] = d
        tk = (b[k] - np.dot(L[k, :k], y[:k])) / d
        # E[z | z < tk] for the conditioning recursion
        cdf = std_normal_cdf(tk)
        if cdf > 1e-300:
            y[k] = -math.exp(-0.5 * tk * tk) / math.sqrt(2.0 * math.pi) / cdf
        else:
            y[k] = -abs(tk)
        for i in range(k + 1, n):
            L[i, k] = (c[i, k] - np.dot(L[i, :k], L[k, :k])) / d
    return L


def _lattice_shift_rngs(seed: int, n_shifts: int):
    return [np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, 0x51A7 + s]))
            for s in range(n_shifts)]


def _sov_estimates(L: np.ndarray, bounds: np.ndarray, seed: int, n_points: int,
                   n_shifts: int) -> np.ndarray:
    """Per-shift SOV estimates, shape (n_shifts, n_bounds)."""
    n = L.shape[0]
    nb = bounds.shape[0]
    q = np.sqrt(_PRIMES[: n - 1])
    i_samples = np.arange(1, n_points + 1)[:, None]
    diag = np.diag(L)
    e_first = ndtr(bounds / diag[0])                    # (nb,)
    out = np.empty((n_shifts, nb))
    for s, rng in enumerate(_lattice_shift_rngs(seed, n_shifts)):
        shift = rng.random(n - 1)
        z = (i_samples * q[None, :] + shift[None, :]) % 1.0
        w = np.abs(2.0 * z - 1.0)                        # tent periodization
        pv = np.broadcast_to(e_first, (n_points, nb)).copy()
        e = pv.copy()
        y = np.empty((n_points, n - 1, nb))
        for k in range(1, n):
            u = np.clip(e * w[:, k - 1, None], _UNIF_LO, _UNIF_HI)
            y[:, k - 1, :] = ndtri(u)
            acc = np.einsum("j,pjb->pb", L[k, :k], y[:, :k, :])
            e = ndtr((bounds[None, :] - acc) / L[k, k])
            pv *= e
        out[s] = pv.mean(axis=0)
    return out


def mvn_cdf_equicoordinate_batch(
    xs: np.ndarray,
    R: CorrelationMatrix,
    accuracy: float = 1e-5,
    seed: int = 0,
    max_points: int = _MVN_DEFAULT_MAX_POINTS,
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Phi_R(x,...,x) for a batch of bounds sharing one lattice pass.

    Returns (probabilities, error_estimates, accuracy_reached). Infinite
    bounds short-circuit to exact 0/1. The batch shares the variable ordering
    derived from the median finite bound; per-bound error estimates are three
    standard errors across the random shifts.
    """
    if not 1e-8 <= accuracy <= 1e-2:
        raise NumericalError(f"accuracy must lie in [1e-8, 1e-2], got {accuracy}")
    xs = np.asarray(xs, dtype=float)
    flat = xs.ravel()
    probs = np.empty(flat.shape)
    errs = np.zeros(flat.shape)
    finite = np.isfinite(flat)
    probs[flat == -math.inf] = 0.0
    probs[flat == math.inf] = 1.0
    if np.any(np.isnan(flat)):
        raise NumericalError("NaN bound passed to the MVN CDF")
    ok = True
    if np.any(finite):
        fb = flat[finite]
        if R.dim == 1:
            probs[finite] = ndtr(fb)
        else:
            L = _reordered_cholesky(R, float(np.median(fb)))
            n_points = _MVN_START_POINTS
            while True:
                ests = _sov_estimates(L, fb, seed, n_points, _MVN_SHIFTS)
                mean = ests.mean(axis=0)
                err = 3.0 * ests.std(axis=0, ddof=1) / math.sqrt(_MVN_SHIFTS)
                if np.all(err <= accuracy) or n_points >= max_points:
                    break
                n_points *= 2
            ok = bool(np.all(err <= accuracy))
            probs[finite] = np.clip(mean, 0.0, 1.0)
            errs[finite] = err
    return probs.reshape(xs.shape), errs.reshape(xs.shape), ok


def mvn_cdf_equicoordinate(
    x: float,
    R: CorrelationMatrix,
    accuracy: float = 1e-5,
    seed: int = 0,
    max_points: int = _MVN_DEFAULT_MAX_POINTS,
) -> tuple[float, float]:
    """Scalar equicoordinate MVN CDF; see the batch variant for semantics."""
    p, e, _ = mvn_cdf_equicoordinate_batch(np.array([x]), R, accuracy, seed, max_points)
    return float(p[0]), float(e[0])


def log_copula_density_factor(x: float, R: CorrelationMatrix) -> float:
    """ln of the equicoordinate Gaussian copula density factor.

    For phi the N-vector with every entry x:
        -0.5 * (phi^T R^-1 phi - phi^T phi) - 0.5 * ln det R
    computed via one triangular solve; the explicit inverse never forms.
    """
    if not math.isfinite(x):
        raise NumericalError(f"copula density factor needs finite x, got {x}")
    phi = np.full(R.dim, float(x))
    v = solve_triangular(R.lower_factor, phi, lower=True)
    quad = float(np.dot(v, v))
    return -0.5 * (quad - R.dim * x * x) - 0.5 * R.log_det


def copula_density_factor(x: float, R: CorrelationMatrix) -> float:
    """exp(-0.5 phi^T (R^-1 - I) phi) / sqrt(det R) at phi = (x, ..., x)."""
    lg = log_copula_density_factor(x, R)
    if lg > 709.0:
        raise NumericalError(f"copula density factor overflows: log value {lg:.3g}")
    return math.exp(lg)
