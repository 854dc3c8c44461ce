"""Run configuration: JSON schema, validation, defaults, scenario assembly.

A run is described by a JSON document whose sections map one-to-one onto the
domain types (all sections and keys optional; omitted values take the
baseline numeric setup: power split 0.4/0.6, alpha=3, L_p=1, distances
100/20/60/100 m, noise -90/-90/-80 dBm, beacon 30 dBm, rates 0.5 bit,
eavesdropper grid 2x2 over 1 wavelength^2):

{
  "topology":   {"d_t": 100, "d_un": 20, "d_uf": 60, "d_e": 100, "alpha": 3, "L_p": 1},
  "radio":      {"p_beacon_dbm": 30, "noise_un_dbm": -90, "noise_uf_dbm": -90, "noise_e_dbm": -80},
  "allocation": {"p_un": 0.4, "p_uf": 0.6},
  "geometry":   {"near_user": {"ports": 4, "area": 1.0},
                 "far_user":  {"n1": 2, "n2": 2, "w1": 1.0, "w2": 1.0},
                 "eavesdropper": {"tas": true}},
  "secrecy":    {"rate_un": 0.5, "rate_uf": 0.5, "scenario": "external",
                 "laguerre_order": 40, "legendre_order": 40,
                 "pdf_mode": "exact", "paper_literal_asc_far": false},
  "snr_overrides_db": {"snr_un": null, "snr_uf": null, "snr_e": 0.0},
  "mvn":        {"accuracy": 1e-5, "seed": 20240801, "max_points": 16384},
  "sweep":      {"variable": "snr_un", "start": 0, "stop": 20, "points": 9, "scale": "dB"},
  "mc":         {"enabled": false, "n_samples": 10000000, "seed": 1234,
                 "mode": "independent_energy_link"},
  "output":     {"csv": "sweep.csv", "precision": 10}
}

Geometry accepts either explicit grid fields (n1, n2, w1, w2 and optionally
correlation_model), the square preset {"ports": N, "area": W} or
{"tas": true}. Unknown keys anywhere are rejected by name. Average SNRs
derive from topology and radio unless pinned in ``snr_overrides_db``; a sweep
variable overrides both.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace

from .channel import (
    FasGeometry,
    NodeId,
    PowerAllocation,
    RadioParams,
    Topology,
    ValidationError,
    average_snr,
    db_to_linear,
    square_grid_geometry,
    tas_geometry,
)
from .distribution import FasGainDistribution, make_distribution
from .metrics import PDF_MODES, ScenarioParams, SecrecyConfig
from .montecarlo import MODES as MC_MODES

__all__ = [
    "ConfigError",
    "SweepSpec",
    "McSpec",
    "MvnSpec",
    "OutputSpec",
    "RunConfig",
    "parse_config",
    "load_config",
    "default_config",
    "build_distributions",
    "build_scenario",
    "SEED_ENV_VAR",
]

SEED_ENV_VAR = "FAS_SECRECY_SEED"
SWEEP_VARIABLES = ("snr_un", "snr_uf", "snr_e", "rate_un", "rate_uf", "beacon_dbm")


class ConfigError(ValueError):
    """Configuration document violates the schema."""


@dataclass(frozen=True)
class SweepSpec:
    variable: str = "snr_un"
    start: float = 0.0
    stop: float = 20.0
    points: int = 9
    scale: str = "dB"

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep.variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        if self.points < 2:
            raise ConfigError(f"sweep.points must be >= 2, got {self.points}")
        if self.scale not in ("dB", "linear"):
            raise ConfigError(f"sweep.scale must be 'dB' or 'linear', got {self.scale!r}")
        if self.variable.startswith("rate") and self.scale == "dB":
            raise ConfigError("rate sweeps must use linear scale")

    def values(self) -> list[float]:
        step = (self.stop - self.start) / (self.points - 1)
        return [self.start + i * step for i in range(self.points)]


@dataclass(frozen=True)
class McSpec:
    enabled: bool = False
    n_samples: int = 10_000_000
    seed: int = 1234
    mode: str = "independent_energy_link"

    def __post_init__(self):
        if self.mode not in MC_MODES:
            raise ConfigError(f"mc.mode must be one of {MC_MODES}, got {self.mode!r}")
        if self.n_samples < 10_000:
            raise ConfigError(f"mc.n_samples must be >= 10000, got {self.n_samples}")


@dataclass(frozen=True)
class MvnSpec:
    accuracy: float = 1e-5
    seed: int = 20240801
    max_points: int = 1 << 14

    def __post_init__(self):
        if not 1e-8 <= self.accuracy <= 1e-2:
            raise ConfigError(f"mvn.accuracy must lie in [1e-8, 1e-2], got {self.accuracy}")


@dataclass(frozen=True)
class OutputSpec:
    csv: str = "sweep.csv"
    precision: int = 10

    def __post_init__(self):
        if not 1 <= self.precision <= 17:
            raise ConfigError(f"output.precision must lie in [1, 17], got {self.precision}")


@dataclass(frozen=True)
class RunConfig:
    topology: Topology = field(default_factory=Topology)
    radio: RadioParams = field(default_factory=RadioParams)
    allocation: PowerAllocation = field(default_factory=PowerAllocation)
    geometry: dict = field(default_factory=dict)          # NodeId -> FasGeometry
    secrecy: SecrecyConfig = field(default_factory=SecrecyConfig)
    snr_overrides_db: dict = field(default_factory=dict)  # str -> float | None
    mvn: MvnSpec = field(default_factory=MvnSpec)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    mc: McSpec = field(default_factory=McSpec)
    output: OutputSpec = field(default_factory=OutputSpec)

    def base_snr(self, node: NodeId) -> float:
        key = {NodeId.NEAR_USER: "snr_un", NodeId.FAR_USER: "snr_uf",
               NodeId.EAVESDROPPER: "snr_e"}[node]
        override = self.snr_overrides_db.get(key)
        if override is not None:
            return db_to_linear(override)
        return average_snr(node, self.topology, self.radio)


def _take(section: dict, allowed: dict, where: str) -> dict:
    """Validate key names of one section and return kwargs."""
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be an object, got {type(section).__name__}")
    bad = set(section) - set(allowed)
    if bad:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(bad)}")
    out = {}
    for key, value in section.items():
        want = allowed[key]
        if want is float:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
            value = float(value)
        elif want is int:
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{where}.{key} must be an integer, got {value!r}")
        elif want is bool:
            if not isinstance(value, bool):
                raise ConfigError(f"{where}.{key} must be a boolean, got {value!r}")
        elif want is str:
            if not isinstance(value, str):
                raise ConfigError(f"{where}.{key} must be a string, got {value!r}")
        out[key] = value
    return out


def _parse_geometry(spec: dict, where: str) -> FasGeometry:
    if not isinstance(spec, dict):
        raise ConfigError(f"{where} must be an object")
    if spec.get("tas"):
        extra = set(spec) - {"tas"}
        if extra:
            raise ConfigError(f"{where}: 'tas' geometry takes no other keys, got {sorted(extra)}")
        return tas_geometry()
    if "ports" in spec or "area" in spec:
        kw = _take(spec, {"ports": int, "area": float, "correlation_model": str}, where)
        try:
            return square_grid_geometry(kw["ports"], kw["area"],
                                        kw.get("correlation_model", "spherical_j0"))
        except (KeyError, ValidationError) as exc:
            raise ConfigError(f"{where}: {exc}") from None
    kw = _take(spec, {"n1": int, "n2": int, "w1": float, "w2": float,
                      "correlation_model": str}, where)
    try:
        return FasGeometry(**kw)
    except (TypeError, ValidationError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


_NODE_KEYS = {"near_user": NodeId.NEAR_USER, "far_user": NodeId.FAR_USER,
              "eavesdropper": NodeId.EAVESDROPPER}


def default_geometry() -> dict:
    return {
        NodeId.NEAR_USER: square_grid_geometry(4, 1.0),
        NodeId.FAR_USER: square_grid_geometry(4, 1.0),
        NodeId.EAVESDROPPER: square_grid_geometry(4, 1.0),
    }


def default_config() -> RunConfig:
    env_seed = os.environ.get(SEED_ENV_VAR)
    kw = {}
    if env_seed is not None:
        kw["mvn"] = MvnSpec(seed=int(env_seed))
        kw["mc"] = McSpec(seed=int(env_seed))
    return RunConfig(geometry=default_geometry(), **kw)


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a JSON run configuration."""
    try:
        doc = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a JSON object")
    known = {"topology", "radio", "allocation", "geometry", "secrecy",
             "snr_overrides_db", "mvn", "sweep", "mc", "output"}
    bad = set(doc) - known
    if bad:
        raise ConfigError(f"unknown top-level key(s): {sorted(bad)}")

    try:
        topology = Topology(**_take(doc.get("topology", {}), {
            "d_t": float, "d_un": float, "d_uf": float, "d_e": float,
            "alpha": float, "L_p": float}, "topology"))
        radio = RadioParams(**_take(doc.get("radio", {}), {
            "p_beacon_dbm": float, "noise_un_dbm": float,
            "noise_uf_dbm": float, "noise_e_dbm": float}, "radio"))
        allocation = PowerAllocation(**_take(doc.get("allocation", {}), {
            "p_un": float, "p_uf": float}, "allocation"))
        secrecy = SecrecyConfig(**_take(doc.get("secrecy", {}), {
            "rate_un": float, "rate_uf": float, "scenario": str,
            "laguerre_order": int, "legendre_order": int,
            "pdf_mode": str, "paper_literal_asc_far": bool}, "secrecy"))
    except (ValidationError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    if secrecy.pdf_mode not in PDF_MODES:
        raise ConfigError(f"secrecy.pdf_mode must be one of {PDF_MODES}")

    geometry = default_geometry()
    geo_doc = doc.get("geometry", {})
    if not isinstance(geo_doc, dict):
        raise ConfigError("geometry must be an object")
    bad = set(geo_doc) - set(_NODE_KEYS)
    if bad:
        raise ConfigError(f"unknown geometry node(s): {sorted(bad)} "
                          f"(expected {sorted(_NODE_KEYS)})")
    for key, node in _NODE_KEYS.items():
        if key in geo_doc:
            geometry[node] = _parse_geometry(geo_doc[key], f"geometry.{key}")

    overrides = {"snr_un": None, "snr_uf": None, "snr_e": None}
    ov_doc = doc.get("snr_overrides_db", {})
    if not isinstance(ov_doc, dict):
        raise ConfigError("snr_overrides_db must be an object")
    bad = set(ov_doc) - set(overrides)
    if bad:
        raise ConfigError(f"unknown snr override(s): {sorted(bad)}")
    for key, value in ov_doc.items():
        if value is not None and (not isinstance(value, (int, float)) or isinstance(value, bool)):
            raise ConfigError(f"snr_overrides_db.{key} must be a number or null")
        overrides[key] = None if value is None else float(value)

    env_seed = os.environ.get(SEED_ENV_VAR)
    mvn_kwargs = _take(doc.get("mvn", {}), {"accuracy": float, "seed": int,
                                            "max_points": int}, "mvn")
    if "seed" not in mvn_kwargs and env_seed is not None:
        mvn_kwargs["seed"] = int(env_seed)
    mc_kwargs = _take(doc.get("mc", {}), {"enabled": bool, "n_samples": int,
                                          "seed": int, "mode": str}, "mc")
    if "seed" not in mc_kwargs and env_seed is not None:
        mc_kwargs["seed"] = int(env_seed)

    return RunConfig(
        topology=topology,
        radio=radio,
        allocation=allocation,
        geometry=geometry,
        secrecy=secrecy,
        snr_overrides_db=overrides,
        mvn=MvnSpec(**mvn_kwargs),
        sweep=SweepSpec(**_take(doc.get("sweep", {}), {
            "variable": str, "start": float, "stop": float,
            "points": int, "scale": str}, "sweep")),
        mc=McSpec(**mc_kwargs),
        output=OutputSpec(**_take(doc.get("output", {}), {
            "csv": str, "precision": int}, "output")),
    )


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _node_seed(base: int, node: NodeId) -> int:
    offset = {NodeId.NEAR_USER: 1, NodeId.FAR_USER: 2, NodeId.EAVESDROPPER: 3}[node]
    return (base * 7919 + offset) & 0x7FFFFFFFFFFFFFFF


def build_distributions(cfg: RunConfig) -> dict:
    """One FasGainDistribution per node, with per-node QMC substreams."""
    return {
        node: make_distribution(
            geom,
            cdf_accuracy=cfg.mvn.accuracy,
            seed=_node_seed(cfg.mvn.seed, node),
            mvn_max_points=cfg.mvn.max_points,
        )
        for node, geom in cfg.geometry.items()
    }


def build_scenario(cfg: RunConfig, dists: dict | None = None,
                   point_overrides: dict | None = None) -> tuple[ScenarioParams, SecrecyConfig]:
    """Assemble (ScenarioParams, SecrecyConfig) for one evaluation point.

    ``point_overrides`` may set linear "snr_un"/"snr_uf"/"snr_e", a
    "beacon_dbm" replacement, or "rate_un"/"rate_uf".
    """
    dists = dists if dists is not None else build_distributions(cfg)
    ov = dict(point_overrides or {})
    radio = cfg.radio
    if "beacon_dbm" in ov:
        radio = replace(radio, p_beacon_dbm=float(ov.pop("beacon_dbm")))
    cfg_eff = replace(cfg, radio=radio) if radio is not cfg.radio else cfg

    snrs = {}
    for key, node in (("snr_un", NodeId.NEAR_USER), ("snr_uf", NodeId.FAR_USER),
                      ("snr_e", NodeId.EAVESDROPPER)):
        if key in ov:
            snrs[key] = float(ov.pop(key))
        else:
            snrs[key] = cfg_eff.base_snr(node)
    secrecy = cfg.secrecy
    if "rate_un" in ov:
        secrecy = replace(secrecy, rate_un=float(ov.pop("rate_un")))
    if "rate_uf" in ov:
        secrecy = replace(secrecy, rate_uf=float(ov.pop("rate_uf")))
    if ov:
        raise ConfigError(f"unknown point override(s): {sorted(ov)}")
    for key, value in snrs.items():
        if not value > 0 or not math.isfinite(value):
            raise ConfigError(f"{key} must be positive and finite, got {value}")
    params = ScenarioParams(
        snr_un=snrs["snr_un"], snr_uf=snrs["snr_uf"], snr_e=snrs["snr_e"],
        alloc=cfg.allocation,
        dist_un=dists[NodeId.NEAR_USER],
        dist_uf=dists[NodeId.FAR_USER],
        dist_e=dists[NodeId.EAVESDROPPER],
    )
    return params, secrecy
