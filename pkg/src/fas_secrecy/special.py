"""Scalar special functions used by the closed-form channel distributions.

Self-contained double-precision implementations:

* ``bessel_k0`` / ``bessel_k1`` — modified Bessel functions of the second kind,
  power series below x = 2 and a convergent continued-fraction evaluation of the
  asymptotic form above (exponentially scaled variants exposed for log-domain work).
* ``sph_bessel_j0`` — spherical Bessel j0(x) = sin(x)/x, the default port
  correlation kernel; ``cyl_bessel_j0`` is the cylindrical alternative.
* ``erf_inv`` / ``std_normal_quantile`` — inverse error function and standard
  normal quantile, Newton-polished to machine precision, with ±inf sentinels at
  the closed endpoints so that degenerate copula arguments propagate exactly.

All functions are pure and reentrant.
"""

from __future__ import annotations

import math

__all__ = [
    "DomainError",
    "bessel_k0",
    "bessel_k1",
    "bessel_k0_scaled",
    "bessel_k1_scaled",
    "log_bessel_k0",
    "sph_bessel_j0",
    "cyl_bessel_j0",
    "erf_inv",
    "std_normal_quantile",
    "std_normal_cdf",
]

_EULER_GAMMA = 0.5772156649015328606
_SQRT_PI = 1.7724538509055160273
_MAX_ITER = 500


class DomainError(ValueError):
    """Argument outside the mathematical domain of the function."""


def _k0_k1_series(x: float) -> tuple[float, float]:
    """Unscaled (K0, K1) by the ascending series; accurate for 0 < x < 2."""
    q = 0.25 * x * x
    lt = math.log(0.5 * x)
    # I0 / I1 and the companion psi-weighted sums share one term recursion
    term_i0 = 1.0
    i0 = 1.0
    k0_sum = 0.0          # sum H_k q^k / (k!)^2, k >= 1
    term_i1 = 1.0         # q^k / (k! (k+1)!)
    i1_sum = 1.0
    k1_sum = 1.0          # (psi(k+1) + psi(k+2) + 2*gamma) q^k / (k!(k+1)!) -> harmonic form
    hk = 0.0
    for k in range(1, _MAX_ITER):
        term_i0 *= q / (k * k)
        hk += 1.0 / k
        i0 += term_i0
        k0_sum += term_i0 * hk
        term_i1 *= q / (k * (k + 1))
        i1_sum += term_i1
        k1_sum += term_i1 * (2.0 * hk + 1.0 / (k + 1))
        if term_i0 < 1e-18 * i0 and term_i1 < 1e-18 * i1_sum:
            break
    k0 = -(lt + _EULER_GAMMA) * i0 + k0_sum
    i1 = 0.5 * x * i1_sum
    # K1 = 1/x + ln(x/2) I1 - (x/4) sum [psi(k+1)+psi(k+2)] q^k/(k!(k+1)!)
    # with psi(1) = -gamma, psi(n+1) = -gamma + H_n
    k1 = 1.0 / x + lt * i1 - 0.25 * x * (k1_sum - 2.0 * _EULER_GAMMA * i1_sum)
    return k0, k1


def _k0_k1_cf2(x: float) -> tuple[float, float]:
    """Exponentially scaled (e^x K0, e^x K1) via the CF2 continued fraction.

    Converges for x >= 2 to near machine precision (Temme's method as used in
    the standard fractional-order Bessel routines, specialized to order 0).
    """
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d
    delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25
    q = a1
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAX_ITER):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < 1e-16:
            break
    h = a1 * h
    k0_scaled = math.sqrt(math.pi / (2.0 * x)) / s
    k1_scaled = k0_scaled * (x + 0.5 - h) / x
    return k0_scaled, k1_scaled


def bessel_k0(x: float) -> float:
    """Modified Bessel function of the second kind, order zero."""
    if not x > 0.0:
        raise DomainError(f"bessel_k0 requires x > 0, got {x!r}")
    if x < 2.0:
        return _k0_k1_series(x)[0]
    k0s, _ = _k0_k1_cf2(x)
    if x > 705.0:
        return 0.0  # underflow; e^-x below double range
    return k0s * math.exp(-x)


def bessel_k1(x: float) -> float:
    """Modified Bessel function of the second kind, order one."""
    if not x > 0.0:
        raise DomainError(f"bessel_k1 requires x > 0, got {x!r}")
    if x < 2.0:
        return _k0_k1_series(x)[1]
    _, k1s = _k0_k1_cf2(x)
    if x > 705.0:
        return 0.0
    return k1s * math.exp(-x)


def bessel_k0_scaled(x: float) -> float:
    """e^x K0(x); stays representable for large x."""
    if not x > 0.0:
        raise DomainError(f"bessel_k0_scaled requires x > 0, got {x!r}")
    if x < 2.0:
        return _k0_k1_series(x)[0] * math.exp(x)
    return _k0_k1_cf2(x)[0]


def bessel_k1_scaled(x: float) -> float:
    """e^x K1(x)."""
    if not x > 0.0:
        raise DomainError(f"bessel_k1_scaled requires x > 0, got {x!r}")
    if x < 2.0:
        return _k0_k1_series(x)[1] * math.exp(x)
    return _k0_k1_cf2(x)[1]


def log_bessel_k0(x: float) -> float:
    """ln K0(x), evaluated without underflow for large x."""
    return math.log(bessel_k0_scaled(x)) - x


def sph_bessel_j0(x: float) -> float:
    """Spherical Bessel function j0(x) = sin(x)/x with the singularity removed."""
    ax = abs(x)
    if ax < 1e-4:
        x2 = x * x
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    return math.sin(x) / x


# cylindrical J0: ascending series below 12, Hankel asymptotic above
def _j0_series(x: float) -> float:
    q = -0.25 * x * x
    term = 1.0
    acc = 1.0
    for k in range(1, _MAX_ITER):
        term *= q / (k * k)
        acc += term
        if abs(term) < 1e-18 * max(abs(acc), 1e-3):
            break
    return acc


def _j0_hankel(x: float) -> float:
    # P, Q from the order-zero asymptotic products ((2k-1)!!)^2 / (k! (8x)^k)
    inv8x = 1.0 / (8.0 * x)
    p = 1.0
    q = 0.0
    term = 1.0
    for k in range(1, 40):
        term *= (2 * k - 1) ** 2 * inv8x / k
        # odd terms feed Q, even terms feed P, with alternating signs:
        # P = 1 - 9/(2!(8x)^2) + ... , Q = -1/(8x) + 225/(3!(8x)^3) - ...
        if k % 2 == 0:
            p += term * (-1.0 if k % 4 == 2 else 1.0)
        else:
            q += term * (-1.0 if k % 4 == 1 else 1.0)
        if term < 1e-17:
            break
    w = x - 0.25 * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(w) - q * math.sin(w))


def cyl_bessel_j0(x: float) -> float:
    """Cylindrical Bessel function J0; alternative port correlation kernel."""
    ax = abs(x)
    if ax <= 12.0:
        return _j0_series(ax)
    return _j0_hankel(ax)


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF via erfc; accurate in both tails."""
    if x != x:
        raise DomainError("std_normal_cdf got NaN")
    if x == math.inf:
        return 1.0
    if x == -math.inf:
        return 0.0
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _erfc_inv(t: float) -> float:
    """Solve erfc(y) = t for t in (0, 1]; y >= 0."""
    if t >= 1.0:
        return 0.0
    # asymptotic initial guess from erfc(y) ~ exp(-y^2)/(y sqrt(pi))
    lt = -math.log(t)
    y = math.sqrt(max(lt - 0.5 * math.log(max(lt, 1e-300) * math.pi), 0.0))
    if y < 0.3:
        y = 0.3
    for _ in range(60):
        f = math.erfc(y) - t
        df = -2.0 / _SQRT_PI * math.exp(-y * y)
        if df == 0.0:
            break
        step = f / df
        y -= step
        if abs(step) <= 1e-16 * max(abs(y), 1.0):
            break
    return y


def erf_inv(p: float) -> float:
    """Inverse error function on (-1, 1); odd, Newton-polished on math.erf."""
    if not -1.0 < p < 1.0:
        raise DomainError(f"erf_inv requires |p| < 1, got {p!r}")
    if p == 0.0:
        return 0.0
    a = abs(p)
    sign = 1.0 if p > 0.0 else -1.0
    if a > 0.9:
        return sign * _erfc_inv(1.0 - a)
    # central region: Winitzki-style initial guess, then Newton on erf
    k = 0.147
    l1m = math.log1p(-a * a)
    tt = 2.0 / (math.pi * k) + 0.5 * l1m
    y = math.sqrt(math.sqrt(tt * tt - l1m / k) - tt)
    for _ in range(20):
        f = math.erf(y) - a
        df = 2.0 / _SQRT_PI * math.exp(-y * y)
        step = f / df
        y -= step
        if abs(step) <= 1e-16 * max(y, 1.0):
            break
    return sign * y


def std_normal_quantile(u: float) -> float:
    """Standard normal quantile; u in [0, 1] with ±inf sentinels at the endpoints.

    The sentinels are exactly what the copula engine expects at distribution
    boundaries (the equicoordinate MVN CDF short-circuits to 0/1 on them).
    """
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"std_normal_quantile requires 0 <= u <= 1, got {u!r}")
    if u == 0.0:
        return -math.inf
    if u == 1.0:
        return math.inf
    if u < 0.25:
        return -math.sqrt(2.0) * _erfc_inv(2.0 * u)
    if u > 0.75:
        return math.sqrt(2.0) * _erfc_inv(2.0 * (1.0 - u))
    return math.sqrt(2.0) * erf_inv(2.0 * u - 1.0)
