"""Command-line front end for simulations, sweeps, and the scenario catalogue.

Exit codes: 0 on success, 2 for configuration problems (bad flags, broken
config files, unknown scenarios or overrides), 3 for numerical failures
(non-finite amplitudes, lost unitarity, fronts that never peak).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    ConfigurationError,
    FrontNotCapturedError,
    NumericalFailureError,
)
from .evolve import evolve
from .model import config_to_dict, load_config
from .output import (
    RunClock,
    write_correlation_csv,
    write_magnetization_csv,
    write_manifest,
)
from .scenarios import SCENARIO_NAMES, run_scenario

_EXIT_CONFIG = 2
_EXIT_NUMERICAL = 3


def _parse_override(text: str):
    if "=" not in text:
        raise ConfigurationError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def _collect_overrides(pairs, mapping):
    """Flag values plus explicit key=value pairs as one override dict."""
    overrides = {}
    for key, value in mapping.items():
        if value is not None:
            overrides[key] = value
    for text in pairs or []:
        key, value = _parse_override(text)
        overrides[key] = value
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinswitch",
        description="Driven spin-chain simulator: spin-wave switching, "
                    "stroboscopic stability, effective Hamiltonians.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a JSON config and write tables")
    sim.add_argument("--config", required=True, help="path to a JSON config file")
    sim.add_argument("--out", default=".", help="output directory")
    sim.add_argument("--dt", type=float, default=None, help="time step in 1/g")
    sim.add_argument("--t-final", type=float, default=None, help="final time in 1/g")
    sim.add_argument("--record-stride", type=int, default=None,
                     help="record every Nth step")

    sweep = sub.add_parser("sweep", help="mid-bond frequency sweep of the switch")
    sweep.add_argument("--out", default=".")
    sweep.add_argument("--L", type=int, default=None)
    sweep.add_argument("--j0", type=float, default=None)
    sweep.add_argument("--omega-min", type=float, default=None)
    sweep.add_argument("--omega-max", type=float, default=None)
    sweep.add_argument("--delta-omega", type=float, default=None)
    sweep.add_argument("--dt", type=float, default=None)
    sweep.add_argument("--t-final", type=float, default=None)
    sweep.add_argument("--workers", type=int, default=1,
                       help="parallel sweep processes (default 1)")

    strobe = sub.add_parser("strobe", help="one-period propagator iterated 10^4 times")
    strobe.add_argument("--out", default=".")
    strobe.add_argument("--L", type=int, default=None)
    strobe.add_argument("--omega", type=float, default=None)
    strobe.add_argument("--dt", type=float, default=None)
    strobe.add_argument("--periods", type=int, default=None)

    magnus = sub.add_parser("magnus", help="effective Hamiltonians by quadrature")
    magnus.add_argument("--out", default=".")
    magnus.add_argument("--L", type=int, default=None)
    magnus.add_argument("--j0", type=float, default=None)
    magnus.add_argument("--omega", type=float, default=None)
    magnus.add_argument("--nodes", type=int, default=None)

    local = sub.add_parser("local", help="single locally driven site")
    local.add_argument("--out", default=".")
    local.add_argument("--L", type=int, default=None)
    local.add_argument("--site", type=int, default=None)
    local.add_argument("--nu", type=float, default=None)
    local.add_argument("--epsilon", type=float, default=None)
    local.add_argument("--lambda0", type=float, default=None)
    local.add_argument("--dt", type=float, default=None)
    local.add_argument("--t-final", type=float, default=None)

    control = sub.add_parser("control", help="zero-average control function traces")
    control.add_argument("--out", default=".")
    control.add_argument("--samples", type=int, default=None)

    scenario = sub.add_parser("scenario", help="run a catalogue entry by name")
    scenario.add_argument("name", help=f"one of: {', '.join(SCENARIO_NAMES)}")
    scenario.add_argument("--out", default=".")
    scenario.add_argument("--workers", type=int, default=1)
    scenario.add_argument("--override", action="append", default=None,
                          metavar="KEY=VALUE",
                          help="override a scenario parameter (repeatable)")

    return parser


def _run_simulate(args) -> dict:
    config, settings = load_config(args.config)
    dt = args.dt if args.dt is not None else settings.dt
    t_final = args.t_final if args.t_final is not None else settings.t_final
    if dt is None or t_final is None:
        raise ConfigurationError(
            "dt and t_final must come from the config file or the flags"
        )
    stride = (args.record_stride if args.record_stride is not None
              else settings.record_stride)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    clock = RunClock()
    traj = evolve(config, dt=dt, t_final=t_final, record_stride=stride)
    files = [
        write_magnetization_csv(outdir / "magnetizations.csv", traj.times,
                                traj.magnetizations),
        write_correlation_csv(outdir / "correlations.csv", traj.times,
                              traj.correlations),
    ]
    summary = {
        "final_norm": float(traj.norms[-1]),
        "max_norm_drift": traj.max_norm_drift,
        "renormalizations": traj.renormalizations,
        "steps": int(round(t_final / dt)),
    }
    write_manifest(
        outdir / "manifest.json", scenario="simulate",
        config_doc=config_to_dict(config),
        run_params={"dt": dt, "t_final": t_final, "record_stride": stride},
        outputs=files, wall_time_s=clock.elapsed(), summary=summary,
    )
    return summary


_FLAG_SCENARIOS = {
    "sweep": ("switch_sweep",
              ("L", "j0", "omega_min", "omega_max", "delta_omega", "dt", "t_final")),
    "strobe": ("stroboscopic", ("L", "omega", "dt", "periods")),
    "magnus": ("magnus", ("L", "j0", "omega", "nodes")),
    "local": ("local_drive", ("L", "site", "nu", "epsilon", "lambda0", "dt", "t_final")),
    "control": ("control_function", ("samples",)),
}


def _dispatch(args) -> dict:
    if args.command == "simulate":
        return _run_simulate(args)
    if args.command in _FLAG_SCENARIOS:
        name, keys = _FLAG_SCENARIOS[args.command]
        overrides = _collect_overrides(
            None, {k: getattr(args, k) for k in keys}
        )
        workers = getattr(args, "workers", 1)
        return run_scenario(name, overrides, args.out, workers=workers).summary
    # scenario subcommand
    overrides = _collect_overrides(args.override, {})
    return run_scenario(args.name, overrides, args.out,
                        workers=args.workers).summary


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        summary = _dispatch(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except (NumericalFailureError, FrontNotCapturedError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
