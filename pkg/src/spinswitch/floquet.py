"""Effective Hamiltonians: Magnus expansion by quadrature and rotating-wave limits.

The Magnus terms are computed from the rotating-frame Hamiltonian on a uniform
time grid.  Both integrals use the composite trapezoid rule, which converges
spectrally for periodic integrands; the nested commutator integral uses a
running prefix sum (left-endpoint inner rule) so the whole thing costs O(N)
matrix products.  Accumulation runs in ascending node order, so results are
bitwise reproducible for a fixed grid.

Dense matrices only: commutators destroy sparsity, so everything here is
capped at MAX_MAGNUS_SITES.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j
from .control import (
    CONTROL_X1,
    CONTROL_X2,
    ControlFunction,
    control_average,
    control_value,
)
from .errors import NumericalFailureError, UnsupportedConfigurationError
from .hilbert import SparseOperator, two_site_coupling
from .model import (
    BondDrivenConfig,
    ConstantSchedule,
    CosineSchedule,
    LatticeConfig,
    LocalDrivenConfig,
    TermList,
    interaction_picture_terms,
    stroboscopic_period,
)

__all__ = [
    "MAX_MAGNUS_SITES",
    "DEFAULT_QUADRATURE_NODES",
    "MIN_QUADRATURE_NODES",
    "HERMITICITY_TOL",
    "PERIODICITY_TOL",
    "RWA_MIN_FREQUENCY_RATIO",
    "MagnusResult",
    "magnus_order0",
    "magnus_order1",
    "magnus_expansion",
    "analytic_hf0",
    "rwa_local_effective",
    "bessel_j",
    "ControlFunction",
    "control_value",
    "control_average",
    "CONTROL_X1",
    "CONTROL_X2",
]

MAX_MAGNUS_SITES = 8
DEFAULT_QUADRATURE_NODES = 4096
MIN_QUADRATURE_NODES = 64
HERMITICITY_TOL = 1e-10
PERIODICITY_TOL = 1e-8
RWA_MIN_FREQUENCY_RATIO = 100.0


@dataclass
class MagnusResult:
    """First two Magnus terms for one driving period.

    order0 and order1 are dense Hermitian matrices in rate units (the
    hermiticity defect is checked against HERMITICITY_TOL at construction).
    """

    order0: np.ndarray
    order1: np.ndarray
    quadrature_points: int
    period: float

    def __post_init__(self):
        for name, mat in (("order0", self.order0), ("order1", self.order1)):
            defect = float(np.abs(mat - mat.conj().T).max())
            if defect > HERMITICITY_TOL:
                raise NumericalFailureError(
                    f"{name} hermiticity defect {defect:.3g} exceeds {HERMITICITY_TOL:g}"
                )

    @property
    def combined(self) -> np.ndarray:
        return self.order0 + self.order1


def _check_magnus_inputs(config: LatticeConfig, period: float | None,
                         n_nodes: int) -> float:
    if config.L > MAX_MAGNUS_SITES:
        raise UnsupportedConfigurationError(
            f"dense Magnus quadrature is limited to {MAX_MAGNUS_SITES} sites, got {config.L}"
        )
    if period is None:
        period = stroboscopic_period(config)
    period = float(period)
    if not math.isfinite(period) or period <= 0:
        raise ValueError(f"period must be positive and finite, got {period}")
    if not isinstance(n_nodes, int) or isinstance(n_nodes, bool):
        raise ValueError(f"quadrature node count must be an integer, got {n_nodes!r}")
    if n_nodes < MIN_QUADRATURE_NODES or n_nodes % 2:
        raise ValueError(
            f"quadrature node count must be even and >= {MIN_QUADRATURE_NODES}, got {n_nodes}"
        )
    return period


def _term_matrices(terms: TermList) -> np.ndarray:
    """Dense 0/1 hop matrix for every kernel term, stacked along axis 0."""
    dim = terms.space.dim
    xor, sel, val = terms.kernel_arrays()
    stack = np.zeros((xor.size, dim, dim))
    idx = np.arange(dim, dtype=np.int64)
    for b in range(xor.size):
        rows = idx[(idx & sel[b]) == val[b]]
        stack[b, rows, rows ^ xor[b]] = 1.0
    return stack


def _dense_at_nodes_setup(config: LatticeConfig, period: float, n_nodes: int):
    """Shared quadrature setup: nodes, coefficient table, term matrices."""
    terms = interaction_picture_terms(config)
    ts = np.linspace(0.0, period, n_nodes + 1)
    coefs = terms.coefficient_table(ts)
    stack = _term_matrices(terms)
    diag = np.diag(terms.kernel_diag.astype(np.complex128))
    mismatch = np.tensordot(coefs[0] - coefs[-1], stack, axes=(0, 0))
    defect = float(np.abs(mismatch).max())
    if defect > PERIODICITY_TOL:
        warnings.warn(
            f"rotating-frame Hamiltonian is not {period:.6g}-periodic "
            f"(endpoint mismatch {defect:.3g}); trapezoid accuracy degrades",
            stacklevel=3,
        )
    return ts, coefs, stack, diag


def magnus_order0(config: LatticeConfig, period: float | None = None,
                  n_nodes: int = DEFAULT_QUADRATURE_NODES) -> np.ndarray:
    """Period average of the rotating-frame Hamiltonian.

    Composite trapezoid on n_nodes+1 uniform nodes over [0, period]; n_nodes
    must be even and at least MIN_QUADRATURE_NODES.  The period defaults to
    the stroboscopic period pi/g.  Warns when the integrand fails to match at
    the interval endpoints, since the trapezoid rule leans on periodicity.
    """
    period = _check_magnus_inputs(config, period, n_nodes)
    _, coefs, stack, diag = _dense_at_nodes_setup(config, period, n_nodes)
    h = period / n_nodes
    w = np.full(n_nodes + 1, h)
    w[0] = w[-1] = 0.5 * h
    avg = (w @ coefs) / period
    return np.tensordot(avg, stack, axes=(0, 0)) + diag


def magnus_order1(config: LatticeConfig, period: float | None = None,
                  n_nodes: int = DEFAULT_QUADRATURE_NODES) -> np.ndarray:
    """Leading Magnus correction, the nested commutator double integral.

    Evaluates (1/(2i*period)) int_0^T dt1 int_0^t1 dt2 [H(t1), H(t2)] with a
    running prefix for the inner integral (left endpoint) and the trapezoid
    rule outside, one commutator per node.  Grid rules match magnus_order0.
    """
    period = _check_magnus_inputs(config, period, n_nodes)
    _, coefs, stack, diag = _dense_at_nodes_setup(config, period, n_nodes)
    h = period / n_nodes
    dim = diag.shape[0]
    prefix = np.zeros((dim, dim), dtype=np.complex128)
    acc = np.zeros((dim, dim), dtype=np.complex128)
    prev = None
    for i in range(n_nodes + 1):
        mat = np.tensordot(coefs[i], stack, axes=(0, 0)) + diag
        if i > 0:
            prefix += h * prev
        w = 0.5 * h if i in (0, n_nodes) else h
        acc += w * (mat @ prefix - prefix @ mat)
        prev = mat
    return acc / (2j * period)


def magnus_expansion(config: LatticeConfig, period: float | None = None,
                     n_nodes: int = DEFAULT_QUADRATURE_NODES) -> MagnusResult:
    """Both Magnus terms on a shared grid, bundled with their metadata."""
    resolved = _check_magnus_inputs(config, period, n_nodes)
    return MagnusResult(
        order0=magnus_order0(config, resolved, n_nodes),
        order1=magnus_order1(config, resolved, n_nodes),
        quadrature_points=n_nodes,
        period=resolved,
    )


def analytic_hf0(config: BondDrivenConfig) -> SparseOperator:
    """Closed-form period average for a chain with one oscillating mid bond.

    Valid for even L with the bond at L/2 carrying a cosine drive and every
    other bond a constant coupling of common strength J0.  The oscillating
    bond averages away while each static xx bond keeps only its flip-flop
    part, so the result is J0 * sum of flipflop over all bonds except L/2,
    two disconnected exchange chains.  A drive at 4g is resonant with the
    double-flip terms and falls outside this formula.
    """
    if not isinstance(config, BondDrivenConfig):
        raise UnsupportedConfigurationError(
            "analytic form applies to bond-driven chains only"
        )
    L = config.L
    if L % 2:
        raise UnsupportedConfigurationError(f"site count must be even, got {L}")
    mid = L // 2
    drive = config.bonds[mid - 1]
    if not isinstance(drive, CosineSchedule):
        raise UnsupportedConfigurationError(
            f"bond {mid} must carry a cosine drive, got {type(drive).__name__}"
        )
    if drive.frequency <= 0:
        raise UnsupportedConfigurationError(
            "drive frequency must be positive for the average to close the bond"
        )
    if math.isclose(drive.frequency, 4.0 * config.g, rel_tol=1e-9):
        raise UnsupportedConfigurationError(
            "drive at 4g resonates with the double-flip terms; no closed form here"
        )
    statics = [s for j, s in enumerate(config.bonds, start=1) if j != mid]
    if not statics:
        raise UnsupportedConfigurationError("no static bonds left beside the driven one")
    for j, s in zip((j for j in range(1, L) if j != mid), statics):
        if not isinstance(s, ConstantSchedule):
            raise UnsupportedConfigurationError(
                f"bond {j} must be constant, got {type(s).__name__}"
            )
        if not math.isclose(s.amplitude, statics[0].amplitude, rel_tol=1e-12):
            raise UnsupportedConfigurationError(
                "static bonds must share one coupling strength"
            )
    j0 = statics[0].amplitude
    space = config.space
    result = None
    for j in range(1, L):
        if j == mid:
            continue
        term = j0 * two_site_coupling(space, j, "flipflop")
        result = term if result is None else result + term
    return result


def rwa_local_effective(config: LocalDrivenConfig) -> SparseOperator:
    """Rotating-wave effective Hamiltonian for a single locally driven site.

    The fast local drive at site k renormalizes the exchange on the two bonds
    touching k by a factor J0(2*epsilon/nu) while the rest of the chain keeps
    its bare flip-flop coupling lambda0.  Validity needs the drive frequency
    to dominate the coupling (nu/lambda0 >= 100) and nu = m*g with odd m, so
    violations raise warnings rather than errors.
    """
    if not isinstance(config, LocalDrivenConfig):
        raise UnsupportedConfigurationError(
            "rotating-wave form applies to locally driven chains only"
        )
    if len(config.drives) > 1:
        raise UnsupportedConfigurationError(
            f"closed form covers a single driven site, got {len(config.drives)}"
        )
    factors = {}
    if config.drives:
        drive = config.drives[0]
        m = drive.nu / config.g
        if not math.isclose(m, round(m), abs_tol=1e-9) or round(m) % 2 == 0 or round(m) < 3:
            warnings.warn(
                f"drive frequency {drive.nu:g} is not an odd multiple (>= 3) of g; "
                "the rotating-wave average picks up neglected resonances"
            )
        if drive.nu / config.lambda0 < RWA_MIN_FREQUENCY_RATIO:
            warnings.warn(
                f"nu/lambda0 = {drive.nu / config.lambda0:.3g} < "
                f"{RWA_MIN_FREQUENCY_RATIO:g}; rotating-wave average is unreliable"
            )
        renorm = config.lambda0 * bessel_j(0, 2.0 * drive.epsilon / drive.nu)
        for b in (drive.site - 1, drive.site):
            if 1 <= b <= config.L - 1:
                factors[b] = renorm
    space = config.space
    result = None
    for j in range(1, config.L):
        term = factors.get(j, config.lambda0) * two_site_coupling(space, j, "flipflop")
        result = term if result is None else result + term
    return result
