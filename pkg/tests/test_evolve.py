import math

import numpy as np
import pytest

from spinswitch.errors import (
    ConfigurationError,
    NumericalFailureError,
    UnsupportedConfigurationError,
)
from spinswitch.evolve import (
    Trajectory,
    evolve,
    evolve_terms,
    one_period_propagator,
    stroboscopic_evolve,
    taylor_order,
)
from spinswitch.model import (
    BondDrivenConfig,
    ConstantSchedule,
    CosineSchedule,
    assemble_hamiltonian,
    initial_state,
    interaction_picture_terms,
    stroboscopic_period,
)


def chain_config(L=4, g=1.0, j0=0.1, omega=2.0, initial=None):
    return BondDrivenConfig(L, g, tuple(CosineSchedule(j0, omega) for _ in range(L - 1)),
                            initial)


def mid_bond_config(L=4, g=1.0, j0=0.1, omega=2.0, initial=None):
    """Constant chain with a single modulated bond in the middle."""
    bonds = [ConstantSchedule(j0)] * (L - 1)
    bonds[L // 2 - 1] = CosineSchedule(j0, omega)
    return BondDrivenConfig(L, g, tuple(bonds), initial)


class TestTaylorOrder:
    def test_zero_norm(self):
        assert taylor_order(0.0, 1e-12) == 1

    def test_monotone_in_norm(self):
        orders = [taylor_order(a, 1e-12) for a in (0.01, 0.1, 0.5, 2.0, 8.0)]
        assert orders == sorted(orders)

    def test_remainder_bound_holds(self):
        for a in (0.05, 0.3, 1.7):
            k = taylor_order(a, 1e-12)
            partial = sum(a**n / math.factorial(n) for n in range(k + 1))
            assert abs(math.exp(a) - partial) < 1e-12

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            taylor_order(-1.0, 1e-12)
        with pytest.raises(ValueError):
            taylor_order(1.0, 2.0)


class TestGridAndRecords:
    def test_records_include_endpoints(self):
        traj = evolve(chain_config(L=2), dt=0.1, t_final=1.0, record_stride=3)
        assert np.allclose(traj.times, [0.0, 0.3, 0.6, 0.9, 1.0])

    def test_grid_extends_to_cover_t_final(self):
        traj = evolve(chain_config(L=2), dt=0.1, t_final=0.95)
        assert traj.times[-1] == pytest.approx(1.0)

    def test_validation(self):
        config = chain_config(L=2)
        with pytest.raises(ConfigurationError):
            evolve(config, dt=-0.1, t_final=1.0)
        with pytest.raises(ConfigurationError):
            evolve(config, dt=0.1, t_final=0.0)
        with pytest.raises(ConfigurationError):
            evolve(config, dt=0.1, t_final=1.0, record_stride=0)

    def test_state_space_mismatch(self):
        terms = assemble_hamiltonian(chain_config(L=3))
        psi = initial_state(chain_config(L=2))
        with pytest.raises(ConfigurationError):
            evolve_terms(terms, psi, 0.1, 1.0)


class TestFieldOnlyChain:
    def test_all_up_is_stationary(self):
        config = BondDrivenConfig(3, 1.0, (ConstantSchedule(0.0),) * 2)
        traj = evolve(config, dt=0.01, t_final=5.0, record_stride=10)
        assert np.abs(traj.magnetizations - 1.0).max() < 1e-12
        assert np.abs(traj.correlations).max() < 1e-12
        # up to the global phase exp(-i L g t) nothing moves
        expected = np.exp(-1j * 3 * traj.times)
        assert np.abs(traj.alpha - expected).max() < 1e-8


class TestTwoSiteRabi:
    def test_matches_closed_form(self):
        g, j0 = 1.0, 0.1
        config = BondDrivenConfig(2, g, (ConstantSchedule(j0),))
        traj = evolve(config, dt=0.002, t_final=10.0, record_stride=5)
        rabi = math.sqrt(j0**2 + 4 * g**2)
        expected = (j0**2 / rabi**2) * np.sin(rabi * traj.times) ** 2
        got = np.abs(traj.beta[:, 0]) ** 2
        assert np.abs(got - expected).max() < 1e-8
        assert np.abs(np.abs(traj.alpha) ** 2 - (1 - expected)).max() < 1e-8
        # the single-flip sector never populates from all-up
        assert np.abs(traj.magnetization(1) - traj.magnetization(2)).max() < 1e-10


class TestConservation:
    def test_norm_and_parity_hold(self):
        traj = evolve(chain_config(L=5, omega=4.0), dt=0.005, t_final=20.0,
                      record_stride=20)
        # the drift monitor pulls the norm back whenever it passes 1e-10, so
        # recorded norms hug 1 far inside the 1e-6 budget
        assert traj.max_norm_drift < 1e-9
        assert np.abs(traj.norms - 1.0).max() < 1e-8
        assert np.abs(traj.parity - traj.parity[0]).max() < 1e-6
        assert abs(traj.final_state.norm() - 1.0) < 1e-8


class TestAccuracy:
    def test_step_halving_agreement(self):
        config = mid_bond_config(L=4)
        a = evolve(config, dt=5e-4, t_final=10.0, record_stride=40)
        b = evolve(config, dt=2.5e-4, t_final=10.0, record_stride=80)
        assert np.allclose(a.times, b.times)
        diff = np.abs(a.magnetizations - b.magnetizations).max()
        diff = max(diff, np.abs(a.correlations - b.correlations).max())
        assert diff < 1e-5

    def test_second_order_convergence(self):
        config = mid_bond_config(L=4)
        fine = evolve(config, dt=1.25e-4, t_final=4.0, record_stride=160)
        mid = evolve(config, dt=2.5e-4, t_final=4.0, record_stride=80)
        coarse = evolve(config, dt=5e-4, t_final=4.0, record_stride=40)
        err_coarse = np.abs(coarse.magnetizations - fine.magnetizations).max()
        err_mid = np.abs(mid.magnetizations - fine.magnetizations).max()
        # halving dt should cut the error by about 4 (richardson ratio 4/1 after
        # subtracting the shared fine-grid bias the bracket is loose on purpose)
        assert 2.5 < err_coarse / err_mid < 6.0

    def test_reversibility(self):
        config = chain_config(L=4, omega=2.0)
        terms = assemble_hamiltonian(config)
        psi0 = initial_state(config)
        fwd = evolve_terms(terms, psi0, dt=1e-3, t_final=5.0, record_stride=1000)
        back = evolve_terms(terms, fwd.final_state, dt=1e-3, t_final=5.0,
                            record_stride=1000, reverse=True)
        fidelity = abs(np.vdot(psi0.amplitudes, back.final_state.amplitudes)) ** 2
        assert fidelity > 1 - 1e-6
        assert back.times[0] == pytest.approx(5.0)
        assert back.times[-1] == pytest.approx(0.0)


class TestFrameEquivalence:
    def test_rotating_frame_reproduces_lab_observables(self):
        config = chain_config(L=2, j0=0.1, omega=4.0)
        dt, t_final, stride = 1e-4, 20.0, 200
        lab = evolve(config, dt=dt, t_final=t_final, record_stride=stride)
        rot = evolve_terms(interaction_picture_terms(config), initial_state(config),
                           dt=dt, t_final=t_final, record_stride=stride)
        assert np.abs(lab.magnetizations - rot.magnetizations).max() < 1e-6
        assert np.abs(lab.correlations - rot.correlations).max() < 1e-6
        assert np.abs(np.abs(lab.alpha) - np.abs(rot.alpha)).max() < 1e-6


class TestNumericalFailure:
    def test_poisoned_state_reports_step(self):
        config = chain_config(L=3)
        psi = initial_state(config)
        psi.amplitudes[0] = np.nan
        with pytest.raises(NumericalFailureError) as err:
            evolve_terms(assemble_hamiltonian(config), psi, 0.01, 1.0)
        assert err.value.step == 0


class TestPropagator:
    def test_size_limit(self):
        with pytest.raises(UnsupportedConfigurationError):
            one_period_propagator(chain_config(L=11), dt=1e-3)

    def test_dt_must_divide_period(self):
        with pytest.raises(ConfigurationError):
            one_period_propagator(chain_config(L=3), dt=1.0)

    def test_unitarity_reported(self):
        config = chain_config(L=3)
        period = stroboscopic_period(config)
        prop = one_period_propagator(config, dt=period / 500)
        assert prop.unitarity_defect < 1e-9
        assert prop.period == pytest.approx(np.pi)

    def test_step_halving_on_propagator(self):
        config = chain_config(L=3)
        period = stroboscopic_period(config)
        u1 = one_period_propagator(config, dt=period / 10000).matrix
        u2 = one_period_propagator(config, dt=period / 20000).matrix
        assert np.abs(u1 - u2).max() < 1e-8

    def test_strobe_matches_direct_evolution(self):
        config = chain_config(L=4, omega=2.0)
        period = stroboscopic_period(config)
        steps_per_period = 2000
        prop = one_period_propagator(config, dt=period / steps_per_period)
        n = 20
        strobe = stroboscopic_evolve(prop, initial_state(config), n)
        direct = evolve(config, dt=period / steps_per_period, t_final=n * period,
                        record_stride=steps_per_period)
        assert np.allclose(strobe.times, direct.times, rtol=0, atol=1e-9)
        assert np.abs(strobe.magnetizations - direct.magnetizations).max() < 1e-6
        assert np.abs(strobe.correlations - direct.correlations).max() < 1e-6

    def test_strobe_validation(self):
        config = chain_config(L=3)
        prop = one_period_propagator(config, dt=stroboscopic_period(config) / 100)
        with pytest.raises(ConfigurationError):
            stroboscopic_evolve(prop, initial_state(config), 0)
        with pytest.raises(ConfigurationError):
            stroboscopic_evolve(prop, initial_state(chain_config(L=4)), 5)
