"""Scenario execution: protocol dispatch, observables, CSV + metadata output.

One scenario = one ResultRecord = one CSV file with the fixed header
``time,observable,site,value,imag_value`` plus a JSON sidecar echoing the
config, code version, and propagation residuals.  Sweeps fan out over a
process pool; each grid point is independent and failures are recorded
per point without aborting the sweep.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time as _time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .basis import Spin1Basis, SpinBasis, build_fock_basis
from .config import ConfigError, ScenarioConfig, config_to_dict, with_override
from .evolve import (
    Model,
    make_model,
    propagate,
    run_echo_ising,
    run_time_reversal,
)
from .hamiltonian import cluster_time, j_zz
from .observables import (
    TimeSeries,
    all_stabilizers,
    collective_cluster_estimate,
    collective_spin,
    fidelity,
    hole_density,
    otoc,
)
from .operators import collective_spin_operator
from .states import StateVector, fock_left_product, spin1_left_product, spin_left_product


class CapExceededError(RuntimeError):
    """Hilbert-space dimension or nonzero estimate above the configured cap."""


CSV_HEADER = ["time", "observable", "site", "value", "imag_value"]


@dataclass
class ResultRecord:
    name: str
    config: dict
    scenario_hash: str
    times: list[float]
    series: list[TimeSeries]
    wall_seconds: float
    norm_residual: float
    version: str = __version__
    note: str = ""
    error: str | None = None


def scenario_hash(cfg: ScenarioConfig) -> str:
    payload = json.dumps(config_to_dict(cfg), sort_keys=True) + __version__
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def estimate_hilbert(cfg: ScenarioConfig) -> tuple[int, int]:
    """(dimension, nonzero estimate) without building anything."""
    L = cfg.geometry.site_count
    n_bonds = max(1, len(cfg.geometry._neighbor_pairs))
    if cfg.model in ("fermi_hubbard_gauged", "fermi_hubbard_literal"):
        dim = math.comb(2 * L, cfg.n_particles)
        per_row = 4 * n_bonds + 1
    elif cfg.model == "spin1":
        dim = 3**L
        per_row = 6 * n_bonds + 1
    else:
        dim = 2**L
        per_row = 2 * n_bonds + 1
    return dim, dim * per_row


def check_caps(cfg: ScenarioConfig):
    dim, nnz = estimate_hilbert(cfg)
    if dim > cfg.max_dim:
        raise CapExceededError(
            f"Hilbert dimension {dim} exceeds cap {cfg.max_dim} "
            f"(model {cfg.model}, {cfg.geometry.site_count} sites)"
        )
    if nnz > cfg.max_nnz:
        raise CapExceededError(f"estimated nonzeros {nnz} exceed cap {cfg.max_nnz}")


def _initial_state(model: Model, cfg: ScenarioConfig) -> StateVector:
    basis = model.basis
    if isinstance(basis, SpinBasis):
        return spin_left_product(basis)
    if isinstance(basis, Spin1Basis):
        return spin1_left_product(basis, cfg.vacancies)
    return fock_left_product(basis, cfg.vacancies)


def physical_times(cfg: ScenarioConfig) -> np.ndarray:
    grid = cfg.times
    scale = cluster_time(cfg.params) if grid.units == "cluster_time" else 1.0
    return np.linspace(grid.start * scale, grid.stop * scale, grid.num)


def _protocol_state(model: Model, psi0: StateVector, cfg: ScenarioConfig, t: float):
    if t == 0.0:
        return psi0.copy()
    if cfg.protocol == "plain":
        return propagate(model.hamiltonian(), psi0, t)
    if cfg.protocol == "echo_ising":
        return run_echo_ising(model, psi0, t)
    if cfg.protocol == "time_reversal":
        t_back = cfg.reversal_time if cfg.reversal_time is not None else t
        return run_time_reversal(model, psi0, t, t_back)
    raise ConfigError(f"protocol {cfg.protocol!r} does not produce a state series")


def _needs_states(cfg: ScenarioConfig) -> bool:
    stateless = {"otoc", "cluster_estimate", "two_site_offdiag"}
    return any(o not in stateless for o in cfg.observables)


def run_scenario(cfg: ScenarioConfig) -> ResultRecord:
    """Execute one validated scenario and collect all its time series."""
    check_caps(cfg)
    t_start = _time.perf_counter()
    geom = cfg.geometry
    times = physical_times(cfg)
    tc = cluster_time(cfg.params)

    model = make_model(cfg.model, geom, cfg.params, n_particles=cfg.n_particles)
    psi0 = _initial_state(model, cfg)

    # reference Ising evolution for fidelity traces (spin-basis models only)
    ref_model = None
    if {"fidelity_vs_ising", "collective_sx_ising"} & set(cfg.observables):
        if not isinstance(model.basis, SpinBasis):
            raise ConfigError("ideal-Ising reference observables require a spin-1/2 model")
        ref_model = make_model("ising", geom, cfg.params)

    rows: dict[str, tuple[list, list, list]] = {}

    def record(name, site, t, value):
        key = f"{name}" if site is None else f"{name}@{site}"
        ts, vs, iv = rows.setdefault(key, ([], [], []))
        ts.append(float(t))
        vs.append(float(np.real(value)))
        iv.append(float(np.imag(value)))

    norm_residual = 0.0
    for t in times:
        psi_t = _protocol_state(model, psi0, cfg, float(t)) if _needs_states(cfg) else None
        if psi_t is not None:
            norm_residual = max(norm_residual, abs(1.0 - psi_t.norm))
        for obs in cfg.observables:
            if obs in ("collective_sx", "collective_sy", "collective_sz"):
                record(obs, None, t, collective_spin(psi_t, obs[-1]))
            elif obs == "sy_sz_sym":
                sy = collective_spin_operator(psi_t.basis, "y").matrix
                sz = collective_spin_operator(psi_t.basis, "z").matrix
                val = 2.0 * np.real(np.vdot(psi_t.amplitudes, sy @ (sz @ psi_t.amplitudes)))
                record(obs, None, t, val)
            elif obs == "stabilizers":
                for j, k in enumerate(all_stabilizers(psi_t, geom)):
                    record("stabilizer", j, t, k)
            elif obs == "stabilizer_mean":
                record(obs, None, t, np.mean(np.real(all_stabilizers(psi_t, geom))))
            elif obs == "hole_density":
                for j in range(geom.site_count):
                    record("hole_density", j, t, hole_density(psi_t, j))
            elif obs == "fidelity_vs_ising":
                ref = propagate(ref_model.hamiltonian(), psi0, float(t)) if t else psi0
                record(obs, None, t, fidelity(psi_t, ref))
            elif obs == "collective_sx_ising":
                ref = propagate(ref_model.hamiltonian(), psi0, float(t)) if t else psi0
                record(obs, None, t, collective_spin(ref, "x"))
            elif obs == "cluster_estimate":
                t_back = cfg.reversal_time if cfg.reversal_time is not None else tc
                record(obs, None, t, collective_cluster_estimate(model, psi0, t=float(t), t_back=t_back))
            elif obs == "otoc":
                record(obs, None, t, otoc(model, psi0, cfg.theta, float(t)).value)
            elif obs == "two_site_offdiag":
                from .evolve import two_site_unitary_offdiag

                record(obs, None, t, two_site_unitary_offdiag(cfg.params, float(t)))

    series = []
    for key, (ts, vs, iv) in sorted(rows.items()):
        name, _, site = key.partition("@")
        series.append(
            TimeSeries(name=name, site=int(site) if site else None, times=ts, values=vs, imag_values=iv)
        )
    wall = _time.perf_counter() - t_start
    return ResultRecord(
        name=cfg.name,
        config=config_to_dict(cfg),
        scenario_hash=scenario_hash(cfg),
        times=[float(t) for t in times],
        series=series,
        wall_seconds=wall,
        norm_residual=norm_residual,
        note=cfg.note,
    )


# ---------------------------------------------------------------------------
# output

def write_csv(record: ResultRecord, path: str):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for ts in record.series:
            site_txt = "" if ts.site is None else str(ts.site)
            imag = ts.imag_values or [0.0] * len(ts.times)
            for t, v, iv in zip(ts.times, ts.values, imag):
                writer.writerow([f"{t:.12g}", ts.name, site_txt, f"{v:.12g}", f"{iv:.12g}"])


def write_metadata(record: ResultRecord, path: str):
    meta = {
        "name": record.name,
        "scenario_hash": record.scenario_hash,
        "version": record.version,
        "wall_seconds": record.wall_seconds,
        "norm_residual": record.norm_residual,
        "config": record.config,
        "note": record.note,
    }
    if record.error:
        meta["error"] = record.error
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_record(record: ResultRecord, output_dir: str) -> str:
    os.makedirs(output_dir, exist_ok=True)
    base = os.path.join(output_dir, record.name)
    write_csv(record, base + ".csv")
    write_metadata(record, base + ".meta.json")
    return base + ".csv"


# ---------------------------------------------------------------------------
# sweeps

def parse_grid(spec: str) -> list[tuple[str, list[str]]]:
    """Parse ``key=v1,v2;key2=w1,w2`` into ordered axes."""
    axes = []
    if not spec.strip():
        return axes
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"grid axis {part!r} must look like key=v1,v2,...")
        key, _, values = part.partition("=")
        vals = [v.strip() for v in values.split(",") if v.strip()]
        if not vals:
            raise ConfigError(f"grid axis {key!r} has no values")
        axes.append((key.strip(), vals))
    return axes


def grid_points(base: ScenarioConfig, axes) -> list[ScenarioConfig]:
    """Cartesian product of grid axes applied to the base config."""
    import itertools

    if not axes:
        return [base]
    points = []
    keys = [k for k, _ in axes]
    for combo in itertools.product(*(vals for _, vals in axes)):
        cfg = base
        for key, val in zip(keys, combo):
            cfg = with_override(cfg, key, val)
        tag = "_".join(f"{k.split('.')[-1]}{v}" for k, v in zip(keys, combo))
        from dataclasses import replace

        cfg = replace(cfg, name=f"{base.name}_{tag}")
        points.append(cfg)
    return points


def _run_point(cfg: ScenarioConfig) -> ResultRecord:
    try:
        return run_scenario(cfg)
    except Exception as exc:  # per-point failures must not kill the sweep
        return ResultRecord(
            name=cfg.name,
            config=config_to_dict(cfg),
            scenario_hash=scenario_hash(cfg),
            times=[],
            series=[],
            wall_seconds=0.0,
            norm_residual=0.0,
            error=f"{type(exc).__name__}: {exc}",
        )


def run_sweep(base: ScenarioConfig, grid_spec: str, workers: int = 1) -> list[ResultRecord]:
    """Run every grid point; deterministic order, per-point error capture."""
    points = grid_points(base, parse_grid(grid_spec))
    if workers <= 1 or len(points) == 1:
        return [_run_point(p) for p in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_point, points))
