"""Hamiltonian descriptions for driven transverse-field Ising chains.

Two lattice variants are supported:

* bond-driven: H(t) = g * sum_j sz_j + sum_j J_j(t) sx_j sx_{j+1}, each bond
  carrying its own drive schedule;
* locally driven: a uniform static xx chain of strength lambda0 in a field
  g, with selected sites k getting an extra field modulation
  eps * cos(nu * t) * sz_k.

`assemble_hamiltonian` produces the lab-frame term list.  For analysis in the
frame rotating with the field, `interaction_picture_terms` splits every xx
bond into ladder products with complex exponential coefficients.  Since the
rotation exp(-i phi_j(t) sz_j) multiplies s+_j by exp(2i phi_j), a bond picks
up exp(+-i(phi_j + phi_j1)) on the double raise/lower parts and
exp(+-i(phi_j - phi_j1)) on the flip-flop parts, where for a driven site
phi_k(t) = g t + (eps/nu) sin(nu t) and for an undriven one phi_j(t) = g t.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy import sparse

from .bessel import bessel_j
from .control import CONTROL_X1, CONTROL_X2, ControlFunction
from .errors import ConfigurationError
from .hilbert import (
    HilbertSpace,
    QuantumState,
    SparseOperator,
    all_up_state,
    product_state,
    site_operator,
    two_site_coupling,
    zsign_table,
)


# ---------------------------------------------------------------------------
# drive schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantSchedule:
    """Time-independent coupling J(t) = amplitude."""

    amplitude: float

    def value_at(self, t: float) -> float:
        return self.amplitude

    def values(self, ts: np.ndarray) -> np.ndarray:
        return np.full(np.shape(ts), self.amplitude, dtype=np.float64)

    def max_abs(self) -> float:
        return abs(self.amplitude)


@dataclass(frozen=True)
class CosineSchedule:
    """J(t) = amplitude * cos(frequency * t); frequency 0 gives a constant."""

    amplitude: float
    frequency: float

    def value_at(self, t: float) -> float:
        return self.amplitude * math.cos(self.frequency * t)

    def values(self, ts: np.ndarray) -> np.ndarray:
        return self.amplitude * np.cos(self.frequency * np.asarray(ts, dtype=np.float64))

    def max_abs(self) -> float:
        return abs(self.amplitude)


@dataclass(frozen=True)
class BesselControlledSchedule:
    """J(t) = amplitude * J0(F(t)) with the cosine switching ramp F.

    The ramp runs from x1 at t = 0 to x2 at t = pi/frequency, so the coupling
    sweeps between the corresponding Bessel values.
    """

    amplitude: float
    frequency: float
    x1: float = CONTROL_X1
    x2: float = CONTROL_X2

    def _control(self) -> ControlFunction:
        return ControlFunction(self.frequency, self.x1, self.x2)

    def value_at(self, t: float) -> float:
        return self.amplitude * bessel_j(0, self._control().value_at(t))

    def values(self, ts: np.ndarray) -> np.ndarray:
        ramp = self._control().values(np.asarray(ts, dtype=np.float64))
        return self.amplitude * np.array([bessel_j(0, f) for f in np.ravel(ramp)]).reshape(
            np.shape(ramp)
        )

    def max_abs(self) -> float:
        return abs(self.amplitude)  # |J0| <= 1


DriveSchedule = Union[ConstantSchedule, CosineSchedule, BesselControlledSchedule]
_REAL_SCHEDULES = (ConstantSchedule, CosineSchedule, BesselControlledSchedule)


@dataclass(frozen=True)
class PhasedSchedule:
    """Complex coefficient base(t) * exp(i (rate*t + sum_k amp_k sin(freq_k t))).

    Used for rotating-frame term lists, where ladder products acquire either a
    linear phase from the static field or a sinusoidal one from a modulated
    local field.
    """

    base: DriveSchedule
    linear_rate: float = 0.0
    sine_terms: tuple[tuple[float, float], ...] = ()

    def phase_at(self, t):
        phase = self.linear_rate * t
        for amp, freq in self.sine_terms:
            phase = phase + amp * np.sin(freq * t)
        return phase

    def value_at(self, t: float) -> complex:
        return self.base.value_at(t) * np.exp(1j * self.phase_at(t))

    def values(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=np.float64)
        return self.base.values(ts) * np.exp(1j * self.phase_at(ts))

    def max_abs(self) -> float:
        return self.base.max_abs()


def drive_value(schedule, t: float):
    """Coefficient of a schedule at time t (real for the drive variants)."""
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    return schedule.value_at(t)


# ---------------------------------------------------------------------------
# lattice configurations
# ---------------------------------------------------------------------------

def _check_spins(L: int, spins) -> tuple[str, ...] | None:
    if spins is None:
        return None
    spins = tuple(spins)
    if len(spins) != L:
        raise ConfigurationError(f"initial state has {len(spins)} labels, chain has {L} sites")
    for s in spins:
        if s not in ("up", "down"):
            raise ConfigurationError(f"spin label must be 'up' or 'down', got {s!r}")
    return spins


@dataclass(frozen=True)
class BondDrivenConfig:
    """Chain with a drive schedule on every bond.

    Args:
        L: number of sites (2..20).
        g: transverse field strength, positive.
        bonds: L-1 schedules, bonds[j-1] driving the (j, j+1) coupling.
        initial: optional product state labels; all-up when omitted.
    """

    L: int
    g: float
    bonds: tuple[DriveSchedule, ...]
    initial: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.L, int) or not 2 <= self.L <= 20:
            raise ConfigurationError(f"L must be an integer in 2..20, got {self.L!r}")
        if not self.g > 0:
            raise ConfigurationError(f"field strength must be positive, got {self.g}")
        object.__setattr__(self, "bonds", tuple(self.bonds))
        if len(self.bonds) != self.L - 1:
            raise ConfigurationError(
                f"need {self.L - 1} bond schedules for L={self.L}, got {len(self.bonds)}"
            )
        for b in self.bonds:
            if not isinstance(b, _REAL_SCHEDULES):
                raise ConfigurationError(f"bond entry {b!r} is not a drive schedule")
        object.__setattr__(self, "initial", _check_spins(self.L, self.initial))

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace(self.L)


@dataclass(frozen=True)
class LocalDrive:
    """Field modulation eps * cos(nu t) on one site."""

    site: int
    epsilon: float
    nu: float

    def __post_init__(self):
        if not self.nu > 0:
            raise ConfigurationError(f"modulation frequency must be positive, got {self.nu}")


@dataclass(frozen=True)
class LocalDrivenConfig:
    """Uniform xx chain with locally modulated transverse field.

    Args:
        L: number of sites (2..20).
        g: static field strength, positive.
        lambda0: static xx coupling on every bond.
        drives: per-site modulations; site indices must be distinct.
        initial: optional product state labels; all-up when omitted.
    """

    L: int
    g: float
    lambda0: float
    drives: tuple[LocalDrive, ...] = ()
    initial: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.L, int) or not 2 <= self.L <= 20:
            raise ConfigurationError(f"L must be an integer in 2..20, got {self.L!r}")
        if not self.g > 0:
            raise ConfigurationError(f"field strength must be positive, got {self.g}")
        object.__setattr__(self, "drives", tuple(self.drives))
        seen = set()
        for d in self.drives:
            if not isinstance(d, LocalDrive):
                raise ConfigurationError(f"drive entry {d!r} is not a LocalDrive")
            if not 1 <= d.site <= self.L:
                raise ConfigurationError(f"driven site {d.site} outside 1..{self.L}")
            if d.site in seen:
                raise ConfigurationError(f"site {d.site} is driven twice")
            seen.add(d.site)
        object.__setattr__(self, "initial", _check_spins(self.L, self.initial))

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace(self.L)


LatticeConfig = Union[BondDrivenConfig, LocalDrivenConfig]


def initial_state(config: LatticeConfig) -> QuantumState:
    """Configured initial product state (all spins up when unspecified)."""
    if config.initial is None:
        return all_up_state(config.space)
    return product_state(config.space, config.initial)


def stroboscopic_period(config: LatticeConfig) -> float:
    """Field period T = pi/g, the natural stroboscopic sampling interval."""
    return math.pi / config.g


# ---------------------------------------------------------------------------
# term lists
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelTerm:
    """One masked hop for the fast integrator.

    Acting on an amplitude vector v, the term adds
    coefficient(t) * v[i ^ xor_mask] to component i whenever
    (i & select_mask) == select_value.  xor_mask 0 encodes a diagonal term.
    """

    xor_mask: int
    select_mask: int
    select_value: int
    schedule: object


@dataclass
class TermList:
    """Static part plus scheduled terms of a (possibly rotating-frame) Hamiltonian.

    `static` and `scheduled` define the operator-level view used by matrix
    assembly and Magnus averaging; `kernel_diag` and `kernel_terms` are the
    equivalent flattened view consumed by the time stepper.
    """

    space: HilbertSpace
    static: SparseOperator
    scheduled: tuple
    kernel_diag: np.ndarray
    kernel_terms: tuple

    def hamiltonian_at(self, t: float) -> SparseOperator:
        """Full H(t) as a sparse matrix (hermitian, verified)."""
        total = self.static.matrix.copy()
        for schedule, op in self.scheduled:
            total = total + schedule.value_at(t) * op.matrix
        return SparseOperator(self.space, total.tocsr(), hermitian=True)

    def norm_bound(self) -> float:
        """Upper bound on max-column-sum norm of H(t), uniform in t."""
        bound = float(np.abs(self.kernel_diag).max()) if self.kernel_diag.size else 0.0
        for term in self.kernel_terms:
            bound += term.schedule.max_abs()
        return bound

    def kernel_arrays(self):
        """Masks as int64 arrays in kernel_terms order."""
        xor = np.array([t.xor_mask for t in self.kernel_terms], dtype=np.int64)
        sel = np.array([t.select_mask for t in self.kernel_terms], dtype=np.int64)
        val = np.array([t.select_value for t in self.kernel_terms], dtype=np.int64)
        return xor, sel, val

    def coefficient_table(self, ts: np.ndarray) -> np.ndarray:
        """Complex coefficients, shape (len(ts), n_terms)."""
        ts = np.asarray(ts, dtype=np.float64)
        table = np.empty((ts.size, len(self.kernel_terms)), dtype=np.complex128)
        for b, term in enumerate(self.kernel_terms):
            table[:, b] = term.schedule.values(ts)
        return table


def _field_diagonal(space: HilbertSpace, g: float) -> np.ndarray:
    return g * zsign_table(space).sum(axis=0)


def _zero_operator(space: HilbertSpace) -> SparseOperator:
    empty = sparse.csr_matrix((space.dim, space.dim), dtype=np.complex128)
    return SparseOperator(space, empty, hermitian=True)


def _field_operator(space: HilbertSpace, g: float) -> SparseOperator:
    total = _zero_operator(space)
    for j in range(1, space.L + 1):
        total = total + g * site_operator(space, j, "z")
    return total


def assemble_hamiltonian(config: LatticeConfig) -> TermList:
    """Lab-frame term list for a lattice configuration.

    For the bond-driven variant the static part is the field alone and each
    bond contributes one scheduled xx term.  For the locally driven variant
    the static part also holds the uniform xx chain, and every modulated site
    contributes a scheduled sz term.
    """
    space = config.space
    diag = _field_diagonal(space, config.g)

    if isinstance(config, BondDrivenConfig):
        static = _field_operator(space, config.g)
        scheduled = []
        kernel_terms = []
        for j, schedule in enumerate(config.bonds, start=1):
            op = two_site_coupling(space, j, "xx")
            scheduled.append((schedule, op))
            kernel_terms.append(KernelTerm(space.bond_mask(j), 0, 0, schedule))
        return TermList(space, static, tuple(scheduled), diag, tuple(kernel_terms))

    if isinstance(config, LocalDrivenConfig):
        static = _field_operator(space, config.g)
        kernel_terms = []
        chain = ConstantSchedule(config.lambda0)
        for j in range(1, space.L):
            static = static + config.lambda0 * two_site_coupling(space, j, "xx")
            kernel_terms.append(KernelTerm(space.bond_mask(j), 0, 0, chain))
        scheduled = []
        for d in config.drives:
            mod = CosineSchedule(d.epsilon, d.nu)
            scheduled.append((mod, site_operator(space, d.site, "z")))
            m = space.site_mask(d.site)
            kernel_terms.append(KernelTerm(0, m, 0, mod))
            kernel_terms.append(KernelTerm(0, m, m, CosineSchedule(-d.epsilon, d.nu)))
        return TermList(space, static, tuple(scheduled), diag, tuple(kernel_terms))

    raise ConfigurationError(f"unknown configuration type {type(config).__name__}")


@lru_cache(maxsize=None)
def _ladder_product(space: HilbertSpace, j: int, left: str, right: str) -> SparseOperator:
    return site_operator(space, j, left) @ site_operator(space, j + 1, right)


def interaction_picture_terms(config: LatticeConfig) -> TermList:
    """Term list in the frame rotating with the (possibly modulated) field.

    The static part vanishes; each bond splits into four ladder products with
    complex exponential coefficients as described in the module docstring.
    """
    space = config.space

    if isinstance(config, BondDrivenConfig):
        schedules = {j: s for j, s in enumerate(config.bonds, start=1)}
        lam = None
        sines = {j: () for j in range(1, space.L + 1)}
        g = config.g
    elif isinstance(config, LocalDrivenConfig):
        lam = ConstantSchedule(config.lambda0)
        schedules = {j: lam for j in range(1, space.L)}
        sines = {j: () for j in range(1, space.L + 1)}
        for d in config.drives:
            sines[d.site] = ((2.0 * d.epsilon / d.nu, d.nu),)
        g = config.g
    else:
        raise ConfigurationError(f"unknown configuration type {type(config).__name__}")

    def neg(terms):
        return tuple((-a, f) for a, f in terms)

    scheduled = []
    kernel_terms = []
    for j in range(1, space.L):
        base = schedules[j]
        m1 = space.site_mask(j)
        m2 = space.site_mask(j + 1)
        mask = m1 | m2
        up_j, up_j1 = sines[j], sines[j + 1]

        # (raise, raise): phases add on top of the 4g rotation
        rr = PhasedSchedule(base, 4.0 * g, up_j + up_j1)
        # (raise at j, lower at j+1): phases subtract
        pm = PhasedSchedule(base, 0.0, up_j + neg(up_j1))
        # hermitian partners
        mp = PhasedSchedule(base, 0.0, neg(up_j) + up_j1)
        ll = PhasedSchedule(base, -4.0 * g, neg(up_j) + neg(up_j1))

        scheduled.append((rr, _ladder_product(space, j, "plus", "plus")))
        scheduled.append((pm, _ladder_product(space, j, "plus", "minus")))
        scheduled.append((mp, _ladder_product(space, j, "minus", "plus")))
        scheduled.append((ll, _ladder_product(space, j, "minus", "minus")))

        kernel_terms.append(KernelTerm(mask, mask, 0, rr))        # target both up
        kernel_terms.append(KernelTerm(mask, mask, m2, pm))       # target j up, j+1 down
        kernel_terms.append(KernelTerm(mask, mask, m1, mp))       # target j down, j+1 up
        kernel_terms.append(KernelTerm(mask, mask, mask, ll))     # target both down

    diag = np.zeros(space.dim, dtype=np.float64)
    return TermList(space, _zero_operator(space), tuple(scheduled), diag, tuple(kernel_terms))


def rotating_frame_phases(config: LatticeConfig, t: float) -> np.ndarray:
    """Diagonal of exp(-i sum_j phi_j(t) sz_j), the frame-change unitary.

    Multiplying a rotating-frame state by this vector returns it to the lab
    frame.  phi_j(t) = g t everywhere, plus (eps/nu) sin(nu t) on driven sites.
    """
    space = config.space
    phi = np.full(space.L, config.g * t, dtype=np.float64)
    if isinstance(config, LocalDrivenConfig):
        for d in config.drives:
            phi[d.site - 1] += d.epsilon / d.nu * math.sin(d.nu * t)
    total = phi @ zsign_table(space)
    return np.exp(-1j * total)


# ---------------------------------------------------------------------------
# JSON configuration files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunSettings:
    """Integration settings that may ride along in a config file."""

    dt: float | None = None
    t_final: float | None = None
    record_stride: int = 1

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.t_final is not None and not self.t_final > 0:
            raise ConfigurationError(f"t_final must be positive, got {self.t_final}")
        if not isinstance(self.record_stride, int) or self.record_stride < 1:
            raise ConfigurationError(
                f"record_stride must be a positive integer, got {self.record_stride!r}"
            )


_TOP_KEYS = {"L", "g", "model", "bonds", "local_drives", "initial", "dt", "t_final",
             "record_stride"}
_BOND_KEYS = {
    "constant": {"kind", "amplitude"},
    "cosine": {"kind", "amplitude", "frequency"},
    "bessel": {"kind", "amplitude", "frequency", "x1", "x2"},
}
_DRIVE_KEYS = {"site", "epsilon", "nu"}


def _reject_unknown(mapping: dict, allowed: set, where: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigurationError(f"unknown key(s) {sorted(unknown)} in {where}")


def _as_float(mapping: dict, key: str, where: str) -> float:
    if key not in mapping:
        raise ConfigurationError(f"missing key '{key}' in {where}")
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"'{key}' in {where} must be a number, got {value!r}")
    return float(value)


def _as_int(mapping: dict, key: str, where: str) -> int:
    if key not in mapping:
        raise ConfigurationError(f"missing key '{key}' in {where}")
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"'{key}' in {where} must be an integer, got {value!r}")
    return value


def _parse_bond(entry, where: str) -> DriveSchedule:
    if not isinstance(entry, dict):
        raise ConfigurationError(f"{where} must be an object, got {entry!r}")
    kind = entry.get("kind")
    if kind not in _BOND_KEYS:
        raise ConfigurationError(
            f"bond kind must be one of {sorted(_BOND_KEYS)}, got {kind!r} in {where}"
        )
    _reject_unknown(entry, _BOND_KEYS[kind], where)
    amplitude = _as_float(entry, "amplitude", where)
    if kind == "constant":
        return ConstantSchedule(amplitude)
    frequency = _as_float(entry, "frequency", where)
    if kind == "cosine":
        return CosineSchedule(amplitude, frequency)
    x1 = _as_float(entry, "x1", where) if "x1" in entry else CONTROL_X1
    x2 = _as_float(entry, "x2", where) if "x2" in entry else CONTROL_X2
    return BesselControlledSchedule(amplitude, frequency, x1, x2)


def parse_config(mapping: dict) -> tuple[LatticeConfig, RunSettings]:
    """Build a configuration and run settings from a parsed JSON object.

    Unknown keys anywhere in the document are rejected rather than ignored, so
    a typo cannot silently fall back to a default.
    """
    if not isinstance(mapping, dict):
        raise ConfigurationError(f"config root must be an object, got {type(mapping).__name__}")
    _reject_unknown(mapping, _TOP_KEYS, "config")
    L = _as_int(mapping, "L", "config")
    g = _as_float(mapping, "g", "config")
    model = mapping.get("model")
    if model not in ("bond_driven", "local_driven"):
        raise ConfigurationError(
            f"model must be 'bond_driven' or 'local_driven', got {model!r}"
        )

    initial = mapping.get("initial")
    if initial is not None:
        if isinstance(initial, str):
            codes = {"u": "up", "d": "down"}
            try:
                initial = tuple(codes[c] for c in initial)
            except KeyError:
                raise ConfigurationError(
                    f"initial string must use only 'u'/'d', got {initial!r}"
                ) from None
        elif isinstance(initial, list):
            initial = tuple(initial)
        else:
            raise ConfigurationError(f"initial must be a string or list, got {initial!r}")

    bonds_raw = mapping.get("bonds", [])
    if not isinstance(bonds_raw, list):
        raise ConfigurationError("bonds must be a list")
    bonds = [_parse_bond(entry, f"bonds[{i}]") for i, entry in enumerate(bonds_raw)]

    drives_raw = mapping.get("local_drives", [])
    if not isinstance(drives_raw, list):
        raise ConfigurationError("local_drives must be a list")

    settings = RunSettings(
        dt=_as_float(mapping, "dt", "config") if "dt" in mapping else None,
        t_final=_as_float(mapping, "t_final", "config") if "t_final" in mapping else None,
        record_stride=_as_int(mapping, "record_stride", "config")
        if "record_stride" in mapping else 1,
    )

    if model == "bond_driven":
        if drives_raw:
            raise ConfigurationError("bond_driven configs take no local_drives")
        config = BondDrivenConfig(L, g, tuple(bonds), initial)
        return config, settings

    # local_driven: bonds define the uniform coupling, one entry or L-1 equal ones
    if not bonds:
        raise ConfigurationError("local_driven configs need a constant bond entry for lambda0")
    amplitudes = set()
    for i, b in enumerate(bonds):
        if not isinstance(b, ConstantSchedule):
            raise ConfigurationError(f"bonds[{i}] must be constant in a local_driven config")
        amplitudes.add(b.amplitude)
    if len(bonds) not in (1, L - 1) or len(amplitudes) != 1:
        raise ConfigurationError(
            "local_driven configs take one constant bond entry (or L-1 equal ones)"
        )
    drives = []
    for i, entry in enumerate(drives_raw):
        where = f"local_drives[{i}]"
        if not isinstance(entry, dict):
            raise ConfigurationError(f"{where} must be an object, got {entry!r}")
        _reject_unknown(entry, _DRIVE_KEYS, where)
        drives.append(
            LocalDrive(
                site=_as_int(entry, "site", where),
                epsilon=_as_float(entry, "epsilon", where),
                nu=_as_float(entry, "nu", where),
            )
        )
    config = LocalDrivenConfig(L, g, amplitudes.pop(), tuple(drives), initial)
    return config, settings


def load_config(path: str | Path) -> tuple[LatticeConfig, RunSettings]:
    """Read and validate a JSON config file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    try:
        mapping = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from exc
    return parse_config(mapping)


def _schedule_to_dict(schedule: DriveSchedule) -> dict:
    if isinstance(schedule, ConstantSchedule):
        return {"kind": "constant", "amplitude": schedule.amplitude}
    if isinstance(schedule, CosineSchedule):
        return {"kind": "cosine", "amplitude": schedule.amplitude,
                "frequency": schedule.frequency}
    if isinstance(schedule, BesselControlledSchedule):
        return {"kind": "bessel", "amplitude": schedule.amplitude,
                "frequency": schedule.frequency, "x1": schedule.x1, "x2": schedule.x2}
    raise ConfigurationError(f"cannot serialize schedule {schedule!r}")


def config_to_dict(config: LatticeConfig, settings: RunSettings | None = None) -> dict:
    """Round-trippable JSON form of a configuration (for manifests)."""
    out: dict = {"L": config.L, "g": config.g}
    if isinstance(config, BondDrivenConfig):
        out["model"] = "bond_driven"
        out["bonds"] = [_schedule_to_dict(b) for b in config.bonds]
    else:
        out["model"] = "local_driven"
        out["bonds"] = [{"kind": "constant", "amplitude": config.lambda0}]
        out["local_drives"] = [
            {"site": d.site, "epsilon": d.epsilon, "nu": d.nu} for d in config.drives
        ]
    if config.initial is not None:
        out["initial"] = "".join("u" if s == "up" else "d" for s in config.initial)
    if settings is not None:
        if settings.dt is not None:
            out["dt"] = settings.dt
        if settings.t_final is not None:
            out["t_final"] = settings.t_final
        out["record_stride"] = settings.record_stride
    return out
