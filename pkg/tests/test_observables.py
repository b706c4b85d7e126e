import numpy as np
import pytest

from spinswitch.errors import FrontNotCapturedError
from spinswitch.evolve import Trajectory, evolve
from spinswitch.hilbert import HilbertSpace, QuantumState, all_up_state, product_state
from spinswitch.model import BondDrivenConfig, CosineSchedule
from spinswitch.observables import (
    LIEB_ROBINSON_FACTOR,
    SWITCH_THRESHOLD,
    ansatz_amplitudes,
    classify_switch,
    connected_correlation,
    front_fit,
)


def synthetic_trajectory(times, correlations, L):
    """Trajectory with only the fields the fit functions look at."""
    times = np.asarray(times, dtype=np.float64)
    correlations = np.asarray(correlations, dtype=np.float64)
    n = times.size
    space = HilbertSpace(L)
    return Trajectory(
        times=times,
        magnetizations=np.ones((n, L)),
        correlations=correlations,
        parity=np.ones(n),
        norms=np.ones(n),
        alpha=np.ones(n, dtype=np.complex128),
        beta=np.zeros((n, L - 1), dtype=np.complex128),
        final_state=all_up_state(space),
        renormalizations=0,
        max_norm_drift=0.0,
        dt=float(times[1] - times[0]) if n > 1 else 1.0,
    )


def bump_correlations(times, peak_times, width=0.7):
    """|C| profiles with one clean gaussian maximum per bond."""
    t = np.asarray(times)[:, None]
    tp = np.asarray(peak_times)[None, :]
    return np.exp(-(((t - tp) / width) ** 2))


class TestConnectedCorrelation:
    def test_product_state_uncorrelated(self):
        space = HilbertSpace(4)
        psi = product_state(space, ["up", "down", "up", "down"])
        for j in range(1, 4):
            assert abs(connected_correlation(psi, j)) < 1e-14

    def test_pair_flip_superposition(self):
        # (|uu> + |dd>)/sqrt(2): <z1 z2> = 1, <z1> = <z2> = 0.
        space = HilbertSpace(2)
        v = np.zeros(4, dtype=np.complex128)
        v[0] = v[3] = 1.0 / np.sqrt(2.0)
        psi = QuantumState(space, v)
        assert connected_correlation(psi, 1) == pytest.approx(1.0, abs=1e-14)

    def test_matches_trajectory_record(self):
        # The evolution kernel records C along the way with its own arithmetic;
        # recomputing from the final state must agree to rounding.
        bonds = tuple(CosineSchedule(0.1, 4.0) for _ in range(3))
        config = BondDrivenConfig(L=4, g=1.0, bonds=bonds)
        traj = evolve(config, dt=2e-3, t_final=3.0, record_stride=250)
        for j in range(1, 4):
            direct = connected_correlation(traj.final_state, j)
            assert direct == pytest.approx(traj.correlations[-1, j - 1], abs=1e-12)

    def test_bond_range_checked(self):
        psi = all_up_state(HilbertSpace(3))
        with pytest.raises(IndexError):
            connected_correlation(psi, 3)


class TestFrontFit:
    def test_recovers_linear_front(self):
        times = np.linspace(0.0, 30.0, 601)
        L = 8
        slope_in, intercept_in = 1.8, 0.9
        peaks = intercept_in + slope_in * np.arange(1, L)
        corr = bump_correlations(times, peaks)
        traj = synthetic_trajectory(times, corr, L)
        fit = front_fit(traj, j0=1.0)
        # peaks land on the grid only up to its spacing of 0.05
        assert fit.slope == pytest.approx(slope_in, abs=0.03)
        assert fit.intercept == pytest.approx(intercept_in, abs=0.1)
        assert fit.v_group == pytest.approx(1.0 / slope_in, rel=0.03)
        assert fit.residual_rms < 0.03

    def test_time_rescaling(self):
        times = np.linspace(0.0, 300.0, 601)
        peaks = 10.0 + 18.0 * np.arange(1, 6)
        traj = synthetic_trajectory(times, bump_correlations(times, peaks, width=7.0), 6)
        fit = front_fit(traj, j0=0.1)
        assert fit.slope == pytest.approx(1.8, abs=0.03)

    def test_earliest_tie_wins(self):
        times = np.linspace(0.0, 10.0, 101)
        corr = np.zeros((101, 2))
        corr[30, 0] = corr[70, 0] = 1.0
        corr[40, 1] = 1.0
        traj = synthetic_trajectory(times, corr, 3)
        fit = front_fit(traj, j0=1.0)
        assert fit.peak_times[0] == pytest.approx(3.0)

    def test_front_not_captured(self):
        times = np.linspace(0.0, 10.0, 101)
        corr = bump_correlations(times, [4.0, 25.0])  # bond 2 still rising
        traj = synthetic_trajectory(times, corr, 3)
        with pytest.raises(FrontNotCapturedError, match=r"\[2\]"):
            front_fit(traj, j0=1.0)

    def test_backwards_front_rejected(self):
        times = np.linspace(0.0, 10.0, 101)
        corr = bump_correlations(times, [8.0, 5.0, 2.0])
        traj = synthetic_trajectory(times, corr, 4)
        with pytest.raises(FrontNotCapturedError):
            front_fit(traj, j0=1.0)

    def test_bond_selection(self):
        times = np.linspace(0.0, 30.0, 301)
        peaks = 1.0 + 2.0 * np.arange(1, 8)
        traj = synthetic_trajectory(times, bump_correlations(times, peaks), 8)
        fit = front_fit(traj, j0=1.0, bonds=[2, 4, 6])
        assert fit.bonds.tolist() == [2, 4, 6]
        assert fit.slope == pytest.approx(2.0, abs=0.05)

    def test_selection_validated(self):
        times = np.linspace(0.0, 10.0, 51)
        traj = synthetic_trajectory(times, bump_correlations(times, [3.0, 5.0]), 3)
        with pytest.raises(ValueError):
            front_fit(traj, j0=1.0, bonds=[1])
        with pytest.raises(IndexError):
            front_fit(traj, j0=1.0, bonds=[1, 5])
        with pytest.raises(ValueError):
            front_fit(traj, j0=0.0)

    def test_lieb_robinson_factor_value(self):
        assert LIEB_ROBINSON_FACTOR == 2.0


class TestClassifySwitch:
    def make(self, peak):
        times = np.linspace(0.0, 10.0, 101)
        corr = np.zeros((101, 2))
        corr[50, 0] = peak
        corr[50, 1] = -peak
        return synthetic_trajectory(times, corr, 3)

    def test_blocked_below_threshold(self):
        v = classify_switch(self.make(0.03), bond=1)
        assert v.mode == "off"
        assert v.blocked
        assert v.max_abs_correlation == pytest.approx(0.03)
        assert v.threshold == SWITCH_THRESHOLD

    def test_open_above_threshold(self):
        v = classify_switch(self.make(0.2), bond=1)
        assert v.mode == "on"
        assert not v.blocked

    def test_sign_ignored(self):
        v = classify_switch(self.make(0.2), bond=2)
        assert v.max_abs_correlation == pytest.approx(0.2)

    def test_threshold_monotone(self):
        traj = self.make(0.10)
        assert classify_switch(traj, 1, threshold=0.09).mode == "on"
        assert classify_switch(traj, 1, threshold=0.11).mode == "off"
        with pytest.raises(ValueError):
            classify_switch(traj, 1, threshold=0.0)


class TestAnsatzAmplitudes:
    def test_all_up(self):
        alpha, beta, residual = ansatz_amplitudes(all_up_state(HilbertSpace(4)))
        assert alpha == pytest.approx(1.0)
        assert np.allclose(beta, 0.0)
        assert residual == pytest.approx(0.0, abs=1e-14)

    def test_explicit_pair_state(self):
        space = HilbertSpace(3)
        v = np.zeros(8, dtype=np.complex128)
        v[0] = 0.8
        v[1 | 4] = 0.6j  # sites 1 and 3 down
        psi = QuantumState(space, v)
        alpha, beta, residual = ansatz_amplitudes(psi)
        assert alpha == pytest.approx(0.8)
        assert beta[0] == pytest.approx(0.0)
        assert beta[1] == pytest.approx(0.6j)
        assert residual == pytest.approx(0.0, abs=1e-14)

    def test_residual_counts_leakage(self):
        space = HilbertSpace(3)
        v = np.zeros(8, dtype=np.complex128)
        v[0] = np.sqrt(0.5)
        v[6] = np.sqrt(0.5)  # sites 2 and 3 down: outside the family
        alpha, beta, residual = ansatz_amplitudes(QuantumState(space, v))
        assert abs(alpha) ** 2 == pytest.approx(0.5)
        assert np.allclose(beta, 0.0)
        assert residual == pytest.approx(0.5)

    def test_matches_trajectory_beta(self):
        bonds = tuple(CosineSchedule(0.1, 4.0) for _ in range(2))
        config = BondDrivenConfig(L=3, g=1.0, bonds=bonds)
        traj = evolve(config, dt=1e-3, t_final=2.0, record_stride=500)
        alpha, beta, _ = ansatz_amplitudes(traj.final_state)
        assert alpha == pytest.approx(complex(traj.alpha[-1]), abs=1e-12)
        assert np.allclose(beta, traj.beta[-1], atol=1e-12)
