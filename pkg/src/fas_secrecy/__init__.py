"""Secrecy-performance analysis of a fluid-antenna-aided wireless-powered
NOMA system: copula/quadrature closed forms plus a Monte Carlo oracle."""

__version__ = "0.1.0"

from .channel import (
    FasGeometry,
    NodeId,
    PowerAllocation,
    RadioParams,
    Topology,
    average_snr,
    correlation_matrix,
    square_grid_geometry,
    tas_geometry,
)
from .config import RunConfig, build_scenario, default_config, load_config, parse_config
from .copula import (
    CorrelationMatrix,
    copula_density_factor,
    mvn_cdf_equicoordinate,
    repair_and_factor,
)
from .distribution import (
    FasGainDistribution,
    cdf_fas,
    cdf_single_port,
    make_distribution,
    pdf_fas,
    pdf_fas_numeric,
    pdf_single_port,
)
from .metrics import (
    METRIC_FUNCTIONS,
    MetricResult,
    ScenarioParams,
    SecrecyConfig,
    asc_external_far,
    asc_external_near,
    asc_internal_near,
    instantaneous_sinr,
    sinr_cdf,
    sop_external_far,
    sop_external_near,
    sop_internal_near,
)
from .montecarlo import MonteCarloEstimate, estimate_asc, estimate_sop, sample_fas_gain
from .quadrature import (
    QuadratureRule,
    gauss_laguerre_rule,
    gauss_legendre_rule,
    integrate_interval,
    integrate_semi_infinite,
)
from .special import (
    bessel_k0,
    bessel_k1,
    erf_inv,
    sph_bessel_j0,
    std_normal_quantile,
)
from .sweep import PRESET_NAMES, emit_csv, preset_runs, run_sweep
