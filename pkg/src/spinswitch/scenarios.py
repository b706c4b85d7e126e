"""Catalogue of runnable experiment recipes with caption-default parameters.

Each scenario resolves to a complete lattice configuration plus run settings,
executes the simulation, writes CSV tables and a JSON manifest into an output
directory, and returns a summary of the headline numbers.  Parameter
overrides are applied by keyword onto the scenario defaults, so e.g. a
shorter chain or a different drive frequency is one override away.

Times passed to the integrator are in 1/g throughout; the emitted CSVs
rescale the time column to each scenario's natural unit (drive periods T,
1/J0, or 1/lambda0) and say so in the header.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bessel import bessel_j
from .control import ControlFunction, control_average
from .errors import (
    ConfigurationError,
    FrontNotCapturedError,
    NumericalFailureError,
)
from .evolve import (
    RENORM_TOL,
    STEP_TOL,
    UNITARITY_TOL,
    evolve,
    one_period_propagator,
    stroboscopic_evolve,
)
from .floquet import analytic_hf0, magnus_expansion
from .model import (
    BondDrivenConfig,
    ConstantSchedule,
    CosineSchedule,
    LocalDrive,
    LocalDrivenConfig,
    config_to_dict,
    initial_state,
    stroboscopic_period,
)
from .observables import SWITCH_THRESHOLD, front_fit
from .output import (
    RunClock,
    write_control_csv,
    write_correlation_csv,
    write_front_fit_json,
    write_magnetization_csv,
    write_manifest,
    write_matrix_csv,
    write_sweep_csv,
)

X0_BESSEL_ROOT = 2.4048

_TOLERANCES = {
    "step_tol": STEP_TOL,
    "renorm_tol": RENORM_TOL,
    "unitarity_tol": UNITARITY_TOL,
    "switch_threshold": SWITCH_THRESHOLD,
}


@dataclass
class ScenarioOutcome:
    name: str
    output_dir: Path
    files: list
    summary: dict


@dataclass
class SweepResult:
    """Per-frequency switch response on a strictly increasing grid."""

    omegas: np.ndarray
    max_abs: np.ndarray
    modes: list
    messages: list
    bond: int

    def __post_init__(self):
        if np.any(np.diff(self.omegas) <= 0):
            raise ValueError("frequency grid must be strictly increasing")

    @property
    def n_errors(self) -> int:
        return sum(1 for m in self.modes if m == "error")


def _chain_bonds(L, j0, driven):
    """Constant-j0 bonds with cosine drives at the given {bond: frequency}."""
    bonds = []
    for j in range(1, L):
        if j in driven:
            bonds.append(CosineSchedule(j0, driven[j]))
        else:
            bonds.append(ConstantSchedule(j0))
    return tuple(bonds)


def _down_at_last(L):
    return tuple(["up"] * (L - 1) + ["down"])


def _merge(defaults, overrides):
    merged = dict(defaults)
    for key, value in (overrides or {}).items():
        if key not in defaults:
            raise ConfigurationError(
                f"unknown override {key!r}; valid keys: {sorted(defaults)}"
            )
        ref = defaults[key]
        if isinstance(ref, int) and not isinstance(ref, bool):
            if float(value) != int(value):
                raise ConfigurationError(f"override {key!r} must be an integer")
            merged[key] = int(value)
        elif isinstance(ref, float):
            merged[key] = float(value)
        else:
            merged[key] = value
    return merged


def _sweep_point(args):
    """One sweep grid point; runs in a worker process when workers > 1."""
    idx, config, dt, t_final, bond = args
    try:
        traj = evolve(config, dt=dt, t_final=t_final)
        peak = float(np.abs(traj.correlation(bond)).max())
        mode = "off" if peak <= SWITCH_THRESHOLD else "on"
        return idx, peak, mode, ""
    except (ConfigurationError, NumericalFailureError) as exc:
        return idx, float("nan"), "error", f"{type(exc).__name__}: {exc}"


def sweep_switch(config_base: BondDrivenConfig, omega_min: float,
                 omega_max: float, delta_omega: float, t_final: float,
                 dt: float | None = None, workers: int = 1) -> SweepResult:
    """Rerun the mid-bond drive over a frequency grid, recording max|C|.

    The bond at L/2 of config_base is replaced by a cosine drive at each grid
    frequency (keeping that bond's amplitude); max_t |C_{L/2,L/2+1}| over
    [0, t_final] classifies the point as on or off.  Failures at single
    points are recorded as error rows and the sweep continues.
    """
    if not isinstance(config_base, BondDrivenConfig):
        raise ConfigurationError("sweep needs a bond-driven chain")
    if delta_omega <= 0:
        raise ConfigurationError(f"grid spacing must be positive, got {delta_omega}")
    if omega_max < omega_min:
        raise ConfigurationError("omega_max must not be below omega_min")
    if workers < 1:
        raise ConfigurationError(f"worker count must be at least 1, got {workers}")
    mid = config_base.L // 2
    if mid < 1 or mid > config_base.L - 1:
        raise ConfigurationError("chain too short for a mid-bond drive")
    if dt is None:
        dt = 0.005 * stroboscopic_period(config_base)
    amplitude = config_base.bonds[mid - 1].amplitude
    n_points = int(math.floor((omega_max - omega_min) / delta_omega + 1e-9)) + 1
    omegas = omega_min + delta_omega * np.arange(n_points)

    jobs = []
    for i, om in enumerate(omegas):
        bonds = list(config_base.bonds)
        bonds[mid - 1] = CosineSchedule(amplitude, float(om))
        config = BondDrivenConfig(
            L=config_base.L, g=config_base.g, bonds=tuple(bonds),
            initial=config_base.initial,
        )
        jobs.append((i, config, dt, t_final, mid))

    results = [None] * n_points
    if workers == 1:
        for job in jobs:
            idx, peak, mode, msg = _sweep_point(job)
            results[idx] = (peak, mode, msg)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for idx, peak, mode, msg in pool.map(_sweep_point, jobs):
                results[idx] = (peak, mode, msg)

    max_abs = np.array([r[0] for r in results])
    return SweepResult(
        omegas=omegas,
        max_abs=max_abs,
        modes=[r[1] for r in results],
        messages=[r[2] for r in results],
        bond=mid,
    )


def _run_blocked(params, outdir):
    L, g, j0 = params["L"], params["g"], params["j0"]
    config = BondDrivenConfig(
        L=L, g=g,
        bonds=_chain_bonds(L, j0, {1: params["omega1"], 2: params["omega2"]}),
    )
    clock = RunClock()
    traj = evolve(config, dt=params["dt"], t_final=params["t_final"],
                  record_stride=params["record_stride"])
    period = stroboscopic_period(config)
    files = [
        write_magnetization_csv(outdir / "magnetizations.csv", traj.times,
                                traj.magnetizations, "T", 1.0 / period),
        write_correlation_csv(outdir / "correlations.csv", traj.times,
                              traj.correlations, "T", 1.0 / period),
    ]
    # dominant oscillation period of the first site, in drive periods
    sz1 = traj.magnetization(1)
    amp = np.abs(np.fft.rfft(sz1 - sz1.mean()))
    peak_bin = int(np.argmax(amp[1:])) + 1
    freqs = np.fft.rfftfreq(sz1.size, d=(traj.times[1] - traj.times[0]) / period)
    floors = traj.magnetizations.min(axis=0)
    summary = {
        "sz1_peak_bin": peak_bin,
        "sz1_dominant_period_T": float(1.0 / freqs[peak_bin]),
        "spectral_bins_total": int(amp.size),
        "sz3_floor": float(floors[2]) if L >= 3 else None,
        "sz_floor_from_site3": float(floors[2:].min()) if L >= 3 else None,
        "renormalizations": traj.renormalizations,
    }
    return config, files, summary, clock.elapsed()


def _run_unblocked(params, outdir):
    L, g, j0 = params["L"], params["g"], params["j0"]
    config = BondDrivenConfig(
        L=L, g=g, bonds=_chain_bonds(L, j0, {1: params["omega1"]}),
    )
    clock = RunClock()
    traj = evolve(config, dt=params["dt"], t_final=params["t_final"],
                  record_stride=params["record_stride"])
    fit = front_fit(traj, j0)
    files = [
        write_magnetization_csv(outdir / "magnetizations.csv", traj.times,
                                traj.magnetizations, "1/J0", j0),
        write_correlation_csv(outdir / "correlations.csv", traj.times,
                              traj.correlations, "1/J0", j0),
        write_front_fit_json(outdir / "front_fit.json", fit),
    ]
    summary = {
        "v_group[J0]": fit.v_group,
        "slope[1/J0 per bond]": fit.slope,
        "intercept[1/J0]": fit.intercept,
        "residual_rms": fit.residual_rms,
        "within_ballistic_bound": bool(fit.v_group <= 2.0),
    }
    return config, files, summary, clock.elapsed()


def _run_switch_sweep(params, outdir, workers):
    L, g, j0 = params["L"], params["g"], params["j0"]
    config = BondDrivenConfig(
        L=L, g=g, bonds=_chain_bonds(L, j0, {}), initial=_down_at_last(L),
    )
    clock = RunClock()
    result = sweep_switch(
        config, params["omega_min"], params["omega_max"],
        params["delta_omega"], params["t_final"], dt=params["dt"],
        workers=workers,
    )
    files = [
        write_sweep_csv(outdir / "sweep.csv", result.omegas, result.max_abs,
                        result.modes, result.messages),
    ]
    ok = ~np.isnan(result.max_abs)
    summary = {
        "points": int(result.omegas.size),
        "errors": result.n_errors,
        "bond": result.bond,
        "min_max_abs_corr": float(np.nanmin(result.max_abs)) if ok.any() else None,
        "max_max_abs_corr": float(np.nanmax(result.max_abs)) if ok.any() else None,
    }
    return config, files, summary, clock.elapsed()


def _run_switch_onoff(params, outdir):
    L, g, j0 = params["L"], params["g"], params["j0"]
    mid = L // 2
    clock = RunClock()
    files = []
    summary = {}
    config = None
    for label, omega in (("on", params["omega_on"]), ("off", params["omega_off"])):
        config = BondDrivenConfig(
            L=L, g=g, bonds=_chain_bonds(L, j0, {mid: omega}),
            initial=_down_at_last(L),
        )
        traj = evolve(config, dt=params["dt"], t_final=params["t_final"],
                      record_stride=params["record_stride"])
        files.append(write_correlation_csv(
            outdir / f"correlations_{label}.csv", traj.times,
            traj.correlations, "1/J0", j0,
        ))
        peak = float(np.abs(traj.correlation(mid)).max())
        summary[f"max_abs_corr_{label}"] = peak
        summary[f"mode_{label}"] = "off" if peak <= SWITCH_THRESHOLD else "on"
    return config, files, summary, clock.elapsed()


def _run_double_drive(params, outdir):
    L, g, j0 = params["L"], params["g"], params["j0"]
    mid = L // 2
    config = BondDrivenConfig(
        L=L, g=g,
        bonds=_chain_bonds(L, j0, {1: params["omega1"], mid: params["omega_mid"]}),
    )
    clock = RunClock()
    traj = evolve(config, dt=params["dt"], t_final=params["t_final"],
                  record_stride=params["record_stride"])
    files = [
        write_correlation_csv(outdir / "correlations.csv", traj.times,
                              traj.correlations, "1/J0", j0),
    ]
    peaks = np.abs(traj.correlations).max(axis=0)
    summary = {
        "max_abs_corr_per_bond": [float(p) for p in peaks],
        "max_abs_corr_from_mid": float(peaks[mid - 1:].max()),
    }
    return config, files, summary, clock.elapsed()


def _run_stroboscopic(params, outdir):
    L, g, j0 = params["L"], params["g"], params["j0"]
    mid = L // 2
    omega = params["omega"]
    config = BondDrivenConfig(
        L=L, g=g, bonds=_chain_bonds(L, j0, {mid: omega}),
        initial=_down_at_last(L),
    )
    period = 2.0 * math.pi / omega
    clock = RunClock()
    prop = one_period_propagator(config, dt=params["dt"], period=period)
    traj = stroboscopic_evolve(prop, initial_state(config), params["periods"],
                               record_stride=params["record_stride"])
    files = [
        write_correlation_csv(outdir / "strobe_correlations.csv", traj.times,
                              traj.correlations, "T", 1.0 / period),
    ]
    summary = {
        "unitarity_defect": prop.unitarity_defect,
        "max_abs_corr_mid": float(np.abs(traj.correlation(mid)).max()),
        "max_abs_corr_next": float(np.abs(traj.correlation(mid + 1)).max())
        if mid + 1 <= L - 1 else None,
        "periods": params["periods"],
    }
    return config, files, summary, clock.elapsed()


def _run_magnus(params, outdir):
    L, g, j0 = params["L"], params["g"], params["j0"]
    mid = L // 2
    omega = params["omega"]
    config = BondDrivenConfig(
        L=L, g=g, bonds=_chain_bonds(L, j0, {mid: omega}),
    )
    period = 2.0 * math.pi / omega
    clock = RunClock()
    result = magnus_expansion(config, period, params["nodes"])
    target = analytic_hf0(config).dense()
    files = [
        write_matrix_csv(outdir / "hf0.csv", result.order0),
        write_matrix_csv(outdir / "hf1.csv", result.order1),
    ]
    max0 = float(np.abs(result.order0).max())
    max1 = float(np.abs(result.order1).max())
    summary = {
        "max_abs_order0": max0,
        "max_abs_order1": max1,
        "order1_to_order0_ratio": max1 / max0 if max0 else None,
        "max_diff_vs_analytic": float(np.abs(result.order0 - target).max()),
        "quadrature_points": result.quadrature_points,
    }
    return config, files, summary, clock.elapsed()


def _run_local_drive(params, outdir):
    L, g = params["L"], params["g"]
    lam = params["lambda0"]
    nu = params["nu"]
    epsilon = params["epsilon"]
    if epsilon is None:
        epsilon = X0_BESSEL_ROOT * nu / 2.0
    config = LocalDrivenConfig(
        L=L, g=g, lambda0=lam,
        drives=(LocalDrive(site=params["site"], epsilon=epsilon, nu=nu),),
        initial=_down_at_last(L),
    )
    clock = RunClock()
    traj = evolve(config, dt=params["dt"], t_final=params["t_final"],
                  record_stride=params["record_stride"])
    files = [
        write_correlation_csv(outdir / "correlations.csv", traj.times,
                              traj.correlations, "1/lambda0", lam),
        write_magnetization_csv(outdir / "magnetizations.csv", traj.times,
                                traj.magnetizations, "1/lambda0", lam),
    ]
    peaks = np.abs(traj.correlations).max(axis=0)
    k = params["site"]
    left = peaks[:k].max() if k >= 1 else None
    summary = {
        "epsilon": epsilon,
        "bessel_argument": 2.0 * epsilon / nu,
        "max_abs_corr_per_bond": [float(p) for p in peaks],
        "max_abs_corr_left_of_drive": float(left) if left is not None else None,
        "max_abs_corr_last_bond": float(peaks[-1]),
    }
    return config, files, summary, clock.elapsed()


def _run_control_function(params, outdir):
    g = params["g"]
    period = math.pi / g
    ts = np.linspace(0.0, 2.0 * period, params["samples"])
    clock = RunClock()
    files = []
    averages = {}
    periodicity = {}
    for omega in (params["omega_a"], params["omega_b"]):
        cf = ControlFunction(omega=omega)
        fvals = cf.values(ts)
        kvals = np.array([bessel_j(0, f) for f in fvals])
        files.append(write_control_csv(
            outdir / f"control_omega_{omega:g}.csv", ts, fvals, kvals,
        ))
        averages[f"omega_{omega:g}"] = control_average(cf, g=g,
                                                       n=params["average_nodes"])
        shift = 2.0 * math.pi / omega
        periodicity[f"omega_{omega:g}"] = float(
            np.abs(cf.values(ts) - cf.values(ts + shift)).max()
        )
    summary = {
        "kernel_averages": averages,
        "periodicity_defect": periodicity,
        "x1": 2.0,
        "x2": 2.84787695,
    }
    return None, files, summary, clock.elapsed()


_DEFAULT_DT = 0.005 * math.pi

_SCENARIO_DEFAULTS = {
    "blocked": {
        "L": 16, "g": 1.0, "j0": 0.1, "omega1": 4.0, "omega2": 2.0,
        "dt": _DEFAULT_DT, "t_final": 200.0 * math.pi, "record_stride": 1,
    },
    "unblocked": {
        "L": 16, "g": 1.0, "j0": 0.1, "omega1": 4.0,
        "dt": 0.0125, "t_final": 105.0, "record_stride": 1,
    },
    "switch_sweep": {
        "L": 6, "g": 1.0, "j0": 0.1,
        "omega_min": 0.0, "omega_max": 3.0, "delta_omega": 0.0151,
        "dt": _DEFAULT_DT, "t_final": 1000.0,
    },
    "switch_onoff": {
        "L": 6, "g": 1.0, "j0": 0.1, "omega_on": 0.15, "omega_off": 2.0,
        "dt": _DEFAULT_DT, "t_final": 1000.0, "record_stride": 1,
    },
    "double_drive": {
        "L": 6, "g": 1.0, "j0": 0.1, "omega1": 4.0, "omega_mid": 2.0,
        "dt": _DEFAULT_DT, "t_final": 1000.0, "record_stride": 1,
    },
    "stroboscopic": {
        "L": 6, "g": 1.0, "j0": 0.1, "omega": 2.0,
        "dt": 1.25e-5 * math.pi, "periods": 10000, "record_stride": 1,
    },
    "magnus": {
        "L": 6, "g": 1.0, "j0": 0.1, "omega": 2.0, "nodes": 4096,
    },
    "local_drive": {
        "L": 9, "g": 1.0, "lambda0": 0.01, "site": 5, "nu": 3.0,
        "epsilon": None, "dt": 0.5, "t_final": 1000.0, "record_stride": 1,
    },
    "control_function": {
        "g": 1.0, "omega_a": 2.0, "omega_b": 4.0, "samples": 2001,
        "average_nodes": 8192,
    },
}

SCENARIO_NAMES = tuple(_SCENARIO_DEFAULTS)


def run_scenario(name: str, overrides: dict | None = None,
                 output_dir=".", workers: int = 1) -> ScenarioOutcome:
    """Execute one catalogue entry and write its outputs plus a manifest."""
    if name not in _SCENARIO_DEFAULTS:
        raise ConfigurationError(
            f"unknown scenario {name!r}; available: {', '.join(SCENARIO_NAMES)}"
        )
    params = _merge(_SCENARIO_DEFAULTS[name], overrides)
    outdir = Path(output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    if name == "blocked":
        config, files, summary, wall = _run_blocked(params, outdir)
    elif name == "unblocked":
        config, files, summary, wall = _run_unblocked(params, outdir)
    elif name == "switch_sweep":
        config, files, summary, wall = _run_switch_sweep(params, outdir, workers)
    elif name == "switch_onoff":
        config, files, summary, wall = _run_switch_onoff(params, outdir)
    elif name == "double_drive":
        config, files, summary, wall = _run_double_drive(params, outdir)
    elif name == "stroboscopic":
        config, files, summary, wall = _run_stroboscopic(params, outdir)
    elif name == "magnus":
        config, files, summary, wall = _run_magnus(params, outdir)
    elif name == "local_drive":
        config, files, summary, wall = _run_local_drive(params, outdir)
    else:
        config, files, summary, wall = _run_control_function(params, outdir)

    manifest = write_manifest(
        outdir / "manifest.json",
        scenario=name,
        config_doc=config_to_dict(config) if config is not None else {},
        run_params={k: v for k, v in params.items()},
        outputs=files,
        wall_time_s=wall,
        summary=summary,
        tolerances=_TOLERANCES,
    )
    return ScenarioOutcome(
        name=name, output_dir=outdir, files=files + [manifest], summary=summary,
    )
