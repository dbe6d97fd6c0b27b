"""Scenario configuration: YAML schema, validation, unit handling.

A scenario file fully specifies one simulation: lattice geometry, model
kind, energy scales, initial state, protocol, time grid, observables, and
resource limits.  Unknown keys anywhere in the file are errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import yaml

from .evolve import MODEL_KINDS
from .hamiltonian import HubbardParams
from .lattice import AXES, BOUNDARIES, GeometryError, LatticeGeometry


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


PROTOCOLS = ("plain", "echo_ising", "time_reversal", "otoc")
TIME_UNITS = ("invJ", "cluster_time")
OBSERVABLES = (
    "collective_sx",
    "collective_sy",
    "collective_sz",
    "sy_sz_sym",
    "stabilizers",
    "stabilizer_mean",
    "hole_density",
    "fidelity_vs_ising",
    "collective_sx_ising",
    "cluster_estimate",
    "otoc",
    "two_site_offdiag",
)

DEFAULT_MAX_DIM = 1_000_000
DEFAULT_MAX_NNZ = 2_000_000


def _require_keys(section: dict, allowed: set, where: str):
    if not isinstance(section, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(section).__name__}")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling times; ``units`` scales stop/start by t_c if set."""

    start: float = 0.0
    stop: float = 2.0
    num: int = 200
    units: str = "cluster_time"

    def __post_init__(self):
        if self.num < 1:
            raise ConfigError(f"times.num must be >= 1, got {self.num}")
        if self.stop < self.start:
            raise ConfigError("times.stop must be >= times.start")
        if self.units not in TIME_UNITS:
            raise ConfigError(f"times.units must be one of {TIME_UNITS}")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    geometry: LatticeGeometry
    model: str
    params: HubbardParams
    vacancies: tuple[int, ...] = ()
    protocol: str = "echo_ising"
    theta: float | None = None
    reversal_time: float | None = None  # backward duration for time_reversal
    times: TimeGrid = field(default_factory=TimeGrid)
    observables: tuple[str, ...] = ("collective_sx",)
    max_dim: int = DEFAULT_MAX_DIM
    max_nnz: int = DEFAULT_MAX_NNZ
    note: str = ""

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"model must be one of {MODEL_KINDS}, got {self.model!r}")
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"protocol must be one of {PROTOCOLS}")
        for obs in self.observables:
            if obs not in OBSERVABLES:
                raise ConfigError(f"unknown observable {obs!r}")
        if not self.observables:
            raise ConfigError("at least one observable is required")
        if self.protocol == "otoc" and self.theta is None:
            raise ConfigError("protocol otoc requires theta")
        L = self.geometry.site_count
        for v in self.vacancies:
            if not (0 <= v < L):
                raise ConfigError(f"vacancy site {v} outside lattice of {L} sites")
        if len(set(self.vacancies)) != len(self.vacancies):
            raise ConfigError("duplicate vacancy sites")
        if self.vacancies and self.model in ("superexchange", "superexchange_zz_only", "ising"):
            raise ConfigError(f"model {self.model!r} cannot represent vacancies")
        if "hole_density" in self.observables and self.model in (
            "superexchange",
            "superexchange_zz_only",
            "ising",
        ):
            raise ConfigError("hole_density requires a Fock or spin-1 model")

    @property
    def n_particles(self) -> int:
        return self.geometry.site_count - len(self.vacancies)


def _parse_geometry(section: dict) -> LatticeGeometry:
    _require_keys(section, {"extents", "tunneling_axes", "boundary"}, "geometry")
    extents = section.get("extents")
    if not isinstance(extents, (list, tuple)):
        raise ConfigError("geometry.extents must be a list")
    extents = tuple(int(e) for e in extents)
    if len(extents) < 3:
        extents = extents + (1,) * (3 - len(extents))
    axes = tuple(section.get("tunneling_axes", ["x"]))
    bnd = section.get("boundary", ["open", "open", "open"])
    if isinstance(bnd, str):
        bnd = [bnd] * 3
    bnd = tuple(bnd)
    if len(bnd) != 3:
        raise ConfigError("geometry.boundary must name all three axes")
    try:
        return LatticeGeometry(extents=extents, tunneling_axes=axes, boundary=bnd)
    except GeometryError as exc:
        raise ConfigError(f"geometry: {exc}") from exc


def _parse_params(section: dict, geometry: LatticeGeometry) -> HubbardParams:
    _require_keys(section, {"J", "U", "Omega"}, "params")
    try:
        return HubbardParams(
            J=float(section["J"]),
            U=float(section["U"]),
            Omega=float(section["Omega"]),
            dimensionality=geometry.dimensionality,
        )
    except KeyError as exc:
        raise ConfigError(f"params: missing {exc.args[0]}") from exc
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from exc


def parse_config(raw: dict, name: str = "scenario") -> ScenarioConfig:
    """Validate a parsed YAML mapping into a ScenarioConfig."""
    _require_keys(
        raw,
        {
            "name",
            "geometry",
            "model",
            "params",
            "initial_state",
            "protocol",
            "times",
            "observables",
            "limits",
            "note",
        },
        "config",
    )
    for key in ("geometry", "model", "params"):
        if key not in raw:
            raise ConfigError(f"config: missing required section {key!r}")
    geometry = _parse_geometry(raw["geometry"])
    params = _parse_params(raw["params"], geometry)

    vacancies: tuple[int, ...] = ()
    init = raw.get("initial_state", {})
    _require_keys(init, {"filling", "vacancies"}, "initial_state")
    filling = init.get("filling", "half")
    if filling != "half":
        raise ConfigError("initial_state.filling: only 'half' (minus vacancies) is supported")
    vacancies = tuple(int(v) for v in init.get("vacancies", []))

    proto = raw.get("protocol", {"type": "echo_ising"})
    if isinstance(proto, str):
        proto = {"type": proto}
    _require_keys(proto, {"type", "theta", "reversal_time"}, "protocol")
    theta = proto.get("theta")
    reversal_time = proto.get("reversal_time")

    times_raw = raw.get("times", {})
    _require_keys(times_raw, {"start", "stop", "num", "units"}, "times")
    try:
        times = TimeGrid(
            start=float(times_raw.get("start", 0.0)),
            stop=float(times_raw.get("stop", 2.0)),
            num=int(times_raw.get("num", 200)),
            units=times_raw.get("units", "cluster_time"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"times: {exc}") from exc

    obs = raw.get("observables", ["collective_sx"])
    if isinstance(obs, str):
        obs = [obs]

    limits = raw.get("limits", {})
    _require_keys(limits, {"max_dim", "max_nnz"}, "limits")

    return ScenarioConfig(
        name=str(raw.get("name", name)),
        geometry=geometry,
        model=str(raw["model"]),
        params=params,
        vacancies=vacancies,
        protocol=str(proto.get("type", "echo_ising")),
        theta=None if theta is None else float(theta),
        reversal_time=None if reversal_time is None else float(reversal_time),
        times=times,
        observables=tuple(obs),
        max_dim=int(limits.get("max_dim", DEFAULT_MAX_DIM)),
        max_nnz=int(limits.get("max_nnz", DEFAULT_MAX_NNZ)),
        note=str(raw.get("note", "")),
    )


def load_config(path: str) -> ScenarioConfig:
    """Read and validate a scenario YAML file."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    import os

    default_name = os.path.splitext(os.path.basename(path))[0]
    return parse_config(raw, name=default_name)


def config_to_dict(cfg: ScenarioConfig) -> dict:
    """Round-trippable plain-dict echo of a config (for sidecar metadata)."""
    return {
        "name": cfg.name,
        "geometry": {
            "extents": list(cfg.geometry.extents),
            "tunneling_axes": list(cfg.geometry.tunneling_axes),
            "boundary": list(cfg.geometry.boundary),
        },
        "model": cfg.model,
        "params": {"J": cfg.params.J, "U": cfg.params.U, "Omega": cfg.params.Omega},
        "initial_state": {"filling": "half", "vacancies": list(cfg.vacancies)},
        "protocol": {
            "type": cfg.protocol,
            **({"theta": cfg.theta} if cfg.theta is not None else {}),
            **({"reversal_time": cfg.reversal_time} if cfg.reversal_time is not None else {}),
        },
        "times": {
            "start": cfg.times.start,
            "stop": cfg.times.stop,
            "num": cfg.times.num,
            "units": cfg.times.units,
        },
        "observables": list(cfg.observables),
        "limits": {"max_dim": cfg.max_dim, "max_nnz": cfg.max_nnz},
        "note": cfg.note,
    }


def with_override(cfg: ScenarioConfig, dotted_key: str, value) -> ScenarioConfig:
    """Return a copy of ``cfg`` with one dotted parameter replaced.

    Supports the keys that make sense to sweep: params.J, params.U,
    params.Omega, protocol.theta, and initial_state.vacancy (single site).
    """
    if dotted_key in ("params.J", "params.U", "params.Omega"):
        field_name = dotted_key.split(".")[1]
        new_params = cfg.params.replaced(**{field_name: float(value)})
        return replace(cfg, params=new_params)
    if dotted_key == "protocol.theta":
        return replace(cfg, theta=float(value))
    if dotted_key == "initial_state.vacancy":
        return replace(cfg, vacancies=(int(value),))
    raise ConfigError(f"unsupported sweep key {dotted_key!r}")
