"""Geometry, topology, power and correlation structure of the secure WPCN.

Value types for the port grids, link distances and radio powers, the
row-major port index mapping, the spatial correlation model between fluid
antenna ports, and the average-SNR arithmetic. dBm-to-linear conversion is
centralized here; everything downstream works on linear scale.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .special import cyl_bessel_j0, sph_bessel_j0

__all__ = [
    "NodeId",
    "FasGeometry",
    "Topology",
    "RadioParams",
    "PowerAllocation",
    "ValidationError",
    "dbm_to_watt",
    "db_to_linear",
    "linear_to_db",
    "port_map",
    "port_unmap",
    "spatial_correlation",
    "correlation_matrix",
    "average_snr",
    "square_grid_geometry",
    "tas_geometry",
]


class ValidationError(ValueError):
    """A parameter violates its documented constraint."""


class NodeId(enum.Enum):
    NEAR_USER = "near_user"
    FAR_USER = "far_user"
    EAVESDROPPER = "eavesdropper"


@dataclass(frozen=True)
class FasGeometry:
    """Planar port grid of one FAS node: n1 x n2 ports over w1 x w2 wavelengths."""

    n1: int
    n2: int
    w1: float
    w2: float
    correlation_model: str = "spherical_j0"   # or "cylindrical_j0"

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValidationError(f"port counts must be >= 1, got {self.n1}x{self.n2}")
        if self.w1 < 0 or self.w2 < 0:
            raise ValidationError(f"apertures must be >= 0, got {self.w1}x{self.w2}")
        if self.correlation_model not in ("spherical_j0", "cylindrical_j0"):
            raise ValidationError(f"unknown correlation model {self.correlation_model!r}")

    @property
    def total_ports(self) -> int:
        return self.n1 * self.n2


def square_grid_geometry(n_total: int, w_area: float, correlation_model: str = "spherical_j0") -> FasGeometry:
    """Square-grid preset: N=4 -> 2x2, N=9 -> 3x3, aperture area split evenly."""
    side = math.isqrt(n_total)
    if side * side != n_total:
        raise ValidationError(f"square grid preset needs a perfect-square port count, got {n_total}")
    w = math.sqrt(w_area)
    return FasGeometry(side, side, w, w, correlation_model)


def tas_geometry() -> FasGeometry:
    """Traditional single fixed antenna, modeled as a degenerate 1x1 grid."""
    return FasGeometry(1, 1, 0.0, 0.0)


@dataclass(frozen=True)
class Topology:
    """Link distances (m), path-loss exponent and propagation loss."""

    d_t: float = 100.0
    d_un: float = 20.0
    d_uf: float = 60.0
    d_e: float = 100.0
    alpha: float = 3.0
    L_p: float = 1.0

    def __post_init__(self):
        for name in ("d_t", "d_un", "d_uf", "d_e", "L_p"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.alpha > 2:
            raise ValidationError(f"path-loss exponent must be > 2, got {self.alpha}")

    def distance(self, node: NodeId) -> float:
        return {NodeId.NEAR_USER: self.d_un,
                NodeId.FAR_USER: self.d_uf,
                NodeId.EAVESDROPPER: self.d_e}[node]


@dataclass(frozen=True)
class RadioParams:
    """Beacon transmit power and per-node noise levels, in dBm."""

    p_beacon_dbm: float = 30.0
    noise_un_dbm: float = -90.0
    noise_uf_dbm: float = -90.0
    noise_e_dbm: float = -80.0

    def __post_init__(self):
        for name in ("p_beacon_dbm", "noise_un_dbm", "noise_uf_dbm", "noise_e_dbm"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")

    def noise_dbm(self, node: NodeId) -> float:
        return {NodeId.NEAR_USER: self.noise_un_dbm,
                NodeId.FAR_USER: self.noise_uf_dbm,
                NodeId.EAVESDROPPER: self.noise_e_dbm}[node]


@dataclass(frozen=True)
class PowerAllocation:
    """NOMA power split; the far (weak) user holds the larger share."""

    p_un: float = 0.4
    p_uf: float = 0.6

    def __post_init__(self):
        if not (0.0 < self.p_un < 1.0 and 0.0 < self.p_uf < 1.0):
            raise ValidationError(f"allocation factors must lie in (0,1), got {self.p_un}, {self.p_uf}")
        if abs(self.p_un + self.p_uf - 1.0) > 1e-12:
            raise ValidationError(f"allocation must sum to 1, got {self.p_un + self.p_uf}")
        if not self.p_uf > self.p_un:
            raise ValidationError(f"far user must hold the larger share, got p_un={self.p_un}, p_uf={self.p_uf}")


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def port_map(n: int, g: FasGeometry) -> tuple[int, int]:
    """1-based row-major port index -> (row, column) on the grid."""
    if not 1 <= n <= g.total_ports:
        raise ValidationError(f"port index {n} outside 1..{g.total_ports}")
    return (n - 1) // g.n2 + 1, (n - 1) % g.n2 + 1

def port_unmap(rc: tuple[int, int], g: FasGeometry) -> int:
    r, c = rc
    if not (1 <= r <= g.n1 and 1 <= c <= g.n2):
        raise ValidationError(f"grid position {rc} outside {g.n1}x{g.n2}")
    return (r - 1) * g.n2 + c


def _j0_kernel(g: FasGeometry):
    return sph_bessel_j0 if g.correlation_model == "spherical_j0" else cyl_bessel_j0


def spatial_correlation(n: int, m: int, g: FasGeometry) -> float:
    """Port-pair correlation: j0(2*pi*d) with d the normalized grid separation.

    A dimension with a single port contributes zero offset (the only continuous
    completion of the (N-1)-normalized spacing).
    """
    r1, c1 = port_map(n, g)
    r2, c2 = port_map(m, g)
    d1 = (r1 - r2) / (g.n1 - 1) * g.w1 if g.n1 > 1 else 0.0
    d2 = (c1 - c2) / (g.n2 - 1) * g.w2 if g.n2 > 1 else 0.0
    return _j0_kernel(g)(2.0 * math.pi * math.hypot(d1, d2))


def correlation_matrix(g: FasGeometry) -> np.ndarray:
    """Raw N x N port correlation matrix (symmetric, unit diagonal)."""
    n = g.total_ports
    rows = np.arange(n) // g.n2
    cols = np.arange(n) % g.n2
    d1 = (rows[:, None] - rows[None, :]) / max(g.n1 - 1, 1) * g.w1 if g.n1 > 1 else np.zeros((n, n))
    d2 = (cols[:, None] - cols[None, :]) / max(g.n2 - 1, 1) * g.w2 if g.n2 > 1 else np.zeros((n, n))
    arg = 2.0 * math.pi * np.hypot(d1, d2)
    kern = _j0_kernel(g)
    out = np.fromiter((kern(v) for v in arg.ravel()), dtype=float, count=n * n).reshape(n, n)
    np.fill_diagonal(out, 1.0)
    return 0.5 * (out + out.T)


def average_snr(node: NodeId, topology: Topology, radio: RadioParams) -> float:
    """Linear-scale average SNR P_p*L_p / (sigma^2 * d_t^alpha * d_j^alpha)."""
    p_w = dbm_to_watt(radio.p_beacon_dbm)
    sigma_w = dbm_to_watt(radio.noise_dbm(node))
    return p_w * topology.L_p / (sigma_w * topology.d_t ** topology.alpha * topology.distance(node) ** topology.alpha)
