"""Result emission: numeric CSV tables plus a JSON manifest per run.

Numbers are printed with 17 significant digits so a round trip through the
files reproduces the float64 values bit for bit; identical configs therefore
produce bit-identical CSVs.  Each time column carries its unit in the header
(time[T], time[1/J0], ...) because different scenarios report different
natural units.  The manifest lists every emitted file with a sha256 hash.
"""

from __future__ import annotations

import hashlib
import json
import time as _time
from pathlib import Path

import numpy as np

from .observables import FrontFit


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_magnetization_csv(path, times, magnetizations, time_unit="1/g",
                            time_scale=1.0) -> Path:
    """Long-format table (time, site, sz), one row per site per sample."""
    path = Path(path)
    mags = np.asarray(magnetizations)
    lines = [f"time[{time_unit}],site,sz\n"]
    for r, t in enumerate(np.asarray(times)):
        tv = _fmt(t * time_scale)
        for j in range(mags.shape[1]):
            lines.append(f"{tv},{j + 1},{_fmt(mags[r, j])}\n")
    path.write_text("".join(lines))
    return path


def write_correlation_csv(path, times, correlations, time_unit="1/g",
                          time_scale=1.0) -> Path:
    """Long-format table (time, bond, c) of connected correlations."""
    path = Path(path)
    corrs = np.asarray(correlations)
    lines = [f"time[{time_unit}],bond,c\n"]
    for r, t in enumerate(np.asarray(times)):
        tv = _fmt(t * time_scale)
        for j in range(corrs.shape[1]):
            lines.append(f"{tv},{j + 1},{_fmt(corrs[r, j])}\n")
    path.write_text("".join(lines))
    return path


def write_sweep_csv(path, omegas, max_abs, modes, messages=None) -> Path:
    """Sweep rows ordered by drive frequency, one per grid point."""
    path = Path(path)
    if messages is None:
        messages = [""] * len(modes)
    lines = ["omega[g],max_abs_corr,mode,message\n"]
    for om, mx, mode, msg in zip(omegas, max_abs, modes, messages):
        clean = str(msg).replace(",", ";").replace("\n", " ")
        lines.append(f"{_fmt(om)},{_fmt(mx)},{mode},{clean}\n")
    path.write_text("".join(lines))
    return path


def write_matrix_csv(path, matrix) -> Path:
    """Dense matrix dump as (row, col, re, im, abs), row-major."""
    path = Path(path)
    mat = np.asarray(matrix, dtype=np.complex128)
    lines = ["row,col,re,im,abs\n"]
    for r in range(mat.shape[0]):
        for c in range(mat.shape[1]):
            v = mat[r, c]
            lines.append(
                f"{r},{c},{_fmt(v.real)},{_fmt(v.imag)},{_fmt(abs(v))}\n"
            )
    path.write_text("".join(lines))
    return path


def write_control_csv(path, ts, f_values, kernel_values) -> Path:
    """Control-function trace: (t, F(t), J0(F(t)))."""
    path = Path(path)
    lines = ["t[1/g],f,j0_of_f\n"]
    for t, f, k in zip(ts, f_values, kernel_values):
        lines.append(f"{_fmt(t)},{_fmt(f)},{_fmt(k)}\n")
    path.write_text("".join(lines))
    return path


def write_front_fit_json(path, fit: FrontFit) -> Path:
    path = Path(path)
    doc = {
        "bonds": fit.bonds.tolist(),
        "peak_times[1/J0]": fit.peak_times.tolist(),
        "peak_values": fit.peak_values.tolist(),
        "slope[1/J0 per bond]": fit.slope,
        "intercept[1/J0]": fit.intercept,
        "v_group[J0]": fit.v_group,
        "residual_rms": fit.residual_rms,
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def sha256_of(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class RunClock:
    """Wall-clock span from construction to elapsed()."""

    def __init__(self):
        self.start = _time.perf_counter()

    def elapsed(self) -> float:
        return _time.perf_counter() - self.start


def write_manifest(path, scenario, config_doc, run_params, outputs,
                   wall_time_s, summary=None, tolerances=None) -> Path:
    """JSON record tying a run's inputs to hashes of everything it wrote."""
    path = Path(path)
    doc = {
        "scenario": scenario,
        "config": config_doc,
        "run_params": run_params,
        "outputs": {Path(p).name: sha256_of(p) for p in outputs},
        "wall_time_s": wall_time_s,
        "summary": summary or {},
        "tolerances": tolerances or {},
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
