"""Derived quantities: bond correlations, wave-front fits, switch verdicts.

Times inside trajectories are in units of 1/g; the front fit rescales them by
the exchange strength so the fitted line and group velocity come out in the
natural 1/J0 and J0 units of ballistic spin-wave transport.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FrontNotCapturedError
from .evolve import Trajectory
from .hilbert import QuantumState, expectation, site_operator, two_site_coupling

SWITCH_THRESHOLD = 0.05
LIEB_ROBINSON_FACTOR = 2.0  # ballistic bound on v_group in units of J0


def connected_correlation(state: QuantumState, j: int) -> float:
    """<z_j z_{j+1}> - <z_j><z_{j+1}> on bond j, from operator expectations.

    This is the slow single-state route; trajectories record the same quantity
    along the way, and the two agree to rounding (see the tests).
    """
    space = state.space
    space.check_bond(j)
    zz = site_operator(space, j, "z") @ site_operator(space, j + 1, "z")
    zj = expectation(site_operator(space, j, "z"), state).real
    zj1 = expectation(site_operator(space, j + 1, "z"), state).real
    return expectation(zz, state).real - zj * zj1


@dataclass
class FrontFit:
    """Least-squares line through the per-bond arrival times of |C| maxima.

    peak_times are in units of 1/J0; slope in 1/J0 per bond; v_group = 1/slope
    in units of J0.
    """

    bonds: np.ndarray
    peak_times: np.ndarray
    peak_values: np.ndarray
    slope: float
    intercept: float
    v_group: float
    residual_rms: float


def front_fit(trajectory: Trajectory, j0: float, bonds: Sequence[int] | None = None) -> FrontFit:
    """Fit the ballistic front from per-bond correlation maxima.

    For each selected bond the global maximum of |C(t)| is located (the
    earliest time on exact ties).  A maximum sitting on the final grid point
    means the run ended before the front peaked there, which raises
    FrontNotCapturedError rather than producing a biased fit.

    Args:
        trajectory: recorded evolution.
        j0: exchange strength used to express times in 1/j0.
        bonds: 1-based bond indices to include; all bonds by default.

    Returns:
        FrontFit with the per-bond peaks and the fitted line.
    """
    if not j0 > 0:
        raise ValueError(f"exchange strength must be positive, got {j0}")
    n_bonds = trajectory.n_sites - 1
    if bonds is None:
        bonds = range(1, n_bonds + 1)
    bonds = np.array(sorted(set(int(b) for b in bonds)), dtype=np.int64)
    if bonds.size < 2:
        raise ValueError("need at least two bonds for a line fit")
    if bonds[0] < 1 or bonds[-1] > n_bonds:
        raise IndexError(f"bond selection {bonds.tolist()} outside 1..{n_bonds}")

    tj0 = trajectory.times * j0
    peak_times = np.empty(bonds.size)
    peak_values = np.empty(bonds.size)
    late = []
    for i, b in enumerate(bonds):
        profile = np.abs(trajectory.correlations[:, b - 1])
        at = int(np.argmax(profile))  # argmax takes the earliest on ties
        if at == profile.size - 1:
            late.append(int(b))
        peak_times[i] = tj0[at]
        peak_values[i] = profile[at]
    if late:
        raise FrontNotCapturedError(
            f"|C| still rising at the final time for bond(s) {late}; extend t_final"
        )

    slope, intercept = np.polyfit(bonds.astype(np.float64), peak_times, 1)
    if slope <= 0:
        raise FrontNotCapturedError(
            f"arrival times do not increase along the chain (slope {slope:.3g})"
        )
    residuals = peak_times - (slope * bonds + intercept)
    return FrontFit(
        bonds=bonds,
        peak_times=peak_times,
        peak_values=peak_values,
        slope=float(slope),
        intercept=float(intercept),
        v_group=float(1.0 / slope),
        residual_rms=float(np.sqrt(np.mean(residuals**2))),
    )


@dataclass
class SwitchVerdict:
    """Outcome of the blocked/unblocked test on one bond."""

    bond: int
    max_abs_correlation: float
    threshold: float
    mode: str  # "off" when the correlation never clears the threshold

    @property
    def blocked(self) -> bool:
        return self.mode == "off"


def classify_switch(trajectory: Trajectory, bond: int,
                    threshold: float = SWITCH_THRESHOLD) -> SwitchVerdict:
    """Label a bond "off" when |C| stays at or below the threshold throughout."""
    if not threshold > 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    peak = float(np.abs(trajectory.correlation(bond)).max())
    return SwitchVerdict(
        bond=bond,
        max_abs_correlation=peak,
        threshold=threshold,
        mode="off" if peak <= threshold else "on",
    )


def ansatz_amplitudes(state: QuantumState) -> tuple[complex, np.ndarray, float]:
    """Overlaps with the all-up state and the pair-flipped states.

    Returns (alpha, beta, residual): alpha is the amplitude on all-up, beta[j-2]
    the amplitude on the state with sites 1 and j pointing down (j = 2..L),
    and residual the probability weight outside that family.
    """
    amps = state.amplitudes
    L = state.space.L
    alpha = complex(amps[0])
    idx = np.array([1 | (1 << (j - 1)) for j in range(2, L + 1)], dtype=np.int64)
    beta = amps[idx].copy()
    residual = 1.0 - abs(alpha) ** 2 - float(np.sum(np.abs(beta) ** 2))
    return alpha, beta, residual
