import json

import numpy as np
import pytest

from spinswitch.bessel import bessel_j
from spinswitch.errors import ConfigurationError
from spinswitch.hilbert import HilbertSpace, parity_signs, site_operator, two_site_coupling
from spinswitch.model import (
    BesselControlledSchedule,
    BondDrivenConfig,
    ConstantSchedule,
    CosineSchedule,
    LocalDrive,
    LocalDrivenConfig,
    PhasedSchedule,
    RunSettings,
    assemble_hamiltonian,
    config_to_dict,
    drive_value,
    initial_state,
    interaction_picture_terms,
    parse_config,
    rotating_frame_phases,
    stroboscopic_period,
)


def uniform_cosine_config(L=4, g=1.0, j0=0.1, omega=2.0, initial=None):
    bonds = tuple(CosineSchedule(j0, omega) for _ in range(L - 1))
    return BondDrivenConfig(L, g, bonds, initial)


def dense_from_kernel(terms, t):
    """Rebuild H(t) from the flattened kernel view, the slow way."""
    dim = terms.space.dim
    h = np.diag(terms.kernel_diag.astype(complex))
    for term in terms.kernel_terms:
        c = term.schedule.value_at(t)
        for i in range(dim):
            if (i & term.select_mask) == term.select_value:
                h[i, i ^ term.xor_mask] += c
    return h


class TestSchedules:
    def test_constant(self):
        s = ConstantSchedule(0.1)
        assert drive_value(s, 3.7) == 0.1
        assert np.all(s.values(np.linspace(0, 5, 7)) == 0.1)

    def test_cosine(self):
        s = CosineSchedule(0.1, 2.0)
        assert drive_value(s, 0.0) == pytest.approx(0.1)
        assert drive_value(s, np.pi / 4) == pytest.approx(0.0, abs=1e-15)
        ts = np.linspace(0, 2, 9)
        assert np.allclose(s.values(ts), 0.1 * np.cos(2.0 * ts))
        assert s.max_abs() == 0.1

    def test_cosine_zero_frequency_is_constant(self):
        s = CosineSchedule(0.1, 0.0)
        assert np.all(s.values(np.linspace(0, 9, 5)) == 0.1)

    def test_bessel_controlled_endpoints(self):
        s = BesselControlledSchedule(0.01, 2.0)
        assert drive_value(s, 0.0) == pytest.approx(0.01 * bessel_j(0, 2.0), rel=1e-12)
        # at t = pi/omega the ramp reaches x2
        end = drive_value(s, np.pi / 2.0)
        assert end == pytest.approx(0.01 * bessel_j(0, 2.84787695), rel=1e-12)

    def test_phased_schedule(self):
        s = PhasedSchedule(ConstantSchedule(0.1), 4.0, ((0.5, 3.0),))
        t = 0.83
        expected = 0.1 * np.exp(1j * (4.0 * t + 0.5 * np.sin(3.0 * t)))
        assert s.value_at(t) == pytest.approx(expected)
        ts = np.array([0.0, 0.4, t])
        assert np.allclose(s.values(ts), [s.value_at(x) for x in ts])

    def test_drive_value_rejects_nonfinite_time(self):
        with pytest.raises(ValueError):
            drive_value(ConstantSchedule(1.0), float("inf"))


class TestConfigValidation:
    def test_bond_count_checked(self):
        with pytest.raises(ConfigurationError):
            BondDrivenConfig(4, 1.0, (ConstantSchedule(0.1),) * 2)

    def test_field_must_be_positive(self):
        with pytest.raises(ConfigurationError):
            BondDrivenConfig(2, 0.0, (ConstantSchedule(0.1),))

    def test_size_limits(self):
        with pytest.raises(ConfigurationError):
            BondDrivenConfig(1, 1.0, ())
        with pytest.raises(ConfigurationError):
            LocalDrivenConfig(21, 1.0, 0.01)

    def test_duplicate_drive_site_rejected(self):
        with pytest.raises(ConfigurationError):
            LocalDrivenConfig(5, 1.0, 0.01,
                              (LocalDrive(2, 1.0, 3.0), LocalDrive(2, 0.5, 3.0)))

    def test_drive_site_range(self):
        with pytest.raises(ConfigurationError):
            LocalDrivenConfig(5, 1.0, 0.01, (LocalDrive(6, 1.0, 3.0),))

    def test_initial_labels_checked(self):
        with pytest.raises(ConfigurationError):
            uniform_cosine_config(L=3, initial=("up", "up"))
        with pytest.raises(ConfigurationError):
            uniform_cosine_config(L=3, initial=("up", "up", "left"))

    def test_initial_state_default_all_up(self):
        config = uniform_cosine_config(L=3)
        psi = initial_state(config)
        assert psi.amplitudes[0] == 1.0
        config2 = uniform_cosine_config(L=3, initial=("down", "up", "up"))
        assert initial_state(config2).amplitudes[1] == 1.0

    def test_period(self):
        assert stroboscopic_period(uniform_cosine_config(g=2.0)) == pytest.approx(np.pi / 2)


class TestAssembly:
    def test_two_site_constant_matches_hand_matrix(self):
        g, j0 = 1.0, 0.1
        config = BondDrivenConfig(2, g, (ConstantSchedule(j0),))
        h = assemble_hamiltonian(config).hamiltonian_at(0.0).dense()
        expected = np.array(
            [
                [2 * g, 0, 0, j0],
                [0, 0, j0, 0],
                [0, j0, 0, 0],
                [j0, 0, 0, -2 * g],
            ],
            dtype=complex,
        )
        assert np.abs(h - expected).max() < 1e-14

    def test_term_counts(self):
        terms = assemble_hamiltonian(uniform_cosine_config(L=6))
        assert len(terms.scheduled) == 5
        assert len(terms.kernel_terms) == 5
        # field diagonal: balanced configurations (20 of 64 at L=6) sum to zero
        assert terms.static.nnz == 44

    def test_kernel_view_matches_operator_view(self):
        config = uniform_cosine_config(L=4, omega=2.0)
        terms = assemble_hamiltonian(config)
        for t in (0.0, 0.37, 1.91):
            dense = terms.hamiltonian_at(t).dense()
            assert np.abs(dense - dense_from_kernel(terms, t)).max() < 1e-13

    def test_local_driven_assembly(self):
        config = LocalDrivenConfig(3, 1.0, 0.01, (LocalDrive(2, 1.2, 3.0),))
        terms = assemble_hamiltonian(config)
        space = HilbertSpace(3)
        t = 0.41
        manual = (
            site_operator(space, 1, "z").dense()
            + site_operator(space, 2, "z").dense()
            + site_operator(space, 3, "z").dense()
            + 0.01 * two_site_coupling(space, 1, "xx").dense()
            + 0.01 * two_site_coupling(space, 2, "xx").dense()
            + 1.2 * np.cos(3.0 * t) * site_operator(space, 2, "z").dense()
        )
        assert np.abs(terms.hamiltonian_at(t).dense() - manual).max() < 1e-13
        assert np.abs(dense_from_kernel(terms, t) - manual).max() < 1e-13

    def test_periodicity_of_cosine_drive(self):
        config = uniform_cosine_config(L=3, g=1.0, omega=2.0)
        terms = assemble_hamiltonian(config)
        period = np.pi  # drive period 2*pi/omega with omega = 2g
        for t in (0.0, 0.3):
            a = terms.hamiltonian_at(t).dense()
            b = terms.hamiltonian_at(t + period).dense()
            assert np.abs(a - b).max() < 1e-12

    def test_parity_commutes(self):
        config = uniform_cosine_config(L=4)
        terms = assemble_hamiltonian(config)
        p = np.diag(parity_signs(HilbertSpace(4)))
        h = terms.hamiltonian_at(0.77).dense()
        assert np.abs(h @ p - p @ h).max() < 1e-12

    def test_norm_bound_dominates(self):
        config = uniform_cosine_config(L=4, g=1.0, j0=0.1)
        terms = assemble_hamiltonian(config)
        bound = terms.norm_bound()
        for t in (0.0, 0.5, 1.3):
            h = terms.hamiltonian_at(t).dense()
            assert np.abs(h).sum(axis=0).max() <= bound + 1e-12


class TestInteractionPicture:
    def test_static_part_vanishes(self):
        terms = interaction_picture_terms(uniform_cosine_config(L=3))
        assert terms.static.nnz == 0
        assert np.all(terms.kernel_diag == 0.0)
        assert len(terms.kernel_terms) == 4 * 2

    def test_reduces_to_coupling_at_t_zero(self):
        config = uniform_cosine_config(L=3, j0=0.1, omega=2.0)
        terms = interaction_picture_terms(config)
        space = HilbertSpace(3)
        expected = 0.1 * (
            two_site_coupling(space, 1, "xx").dense()
            + two_site_coupling(space, 2, "xx").dense()
        )
        assert np.abs(terms.hamiltonian_at(0.0).dense() - expected).max() < 1e-13

    @pytest.mark.parametrize("t", [0.37, 1.2, 2.9])
    def test_matches_frame_conjugation_bond_driven(self, t):
        # independent route: H_I = R^dag (H_lab - field) R with R the frame diagonal
        config = uniform_cosine_config(L=3, g=1.0, j0=0.1, omega=2.0)
        space = config.space
        coupling = sum(
            config.bonds[j - 1].value_at(t) * two_site_coupling(space, j, "xx").dense()
            for j in range(1, 3)
        )
        r = rotating_frame_phases(config, t)
        expected = np.conj(r)[:, None] * coupling * r[None, :]
        got = interaction_picture_terms(config).hamiltonian_at(t).dense()
        assert np.abs(got - expected).max() < 1e-12

    @pytest.mark.parametrize("t", [0.37, 1.2, 2.9])
    def test_matches_frame_conjugation_local_driven(self, t):
        config = LocalDrivenConfig(3, 1.0, 0.01, (LocalDrive(2, 3.6, 3.0),))
        space = config.space
        coupling = 0.01 * (
            two_site_coupling(space, 1, "xx").dense()
            + two_site_coupling(space, 2, "xx").dense()
        )
        r = rotating_frame_phases(config, t)
        expected = np.conj(r)[:, None] * coupling * r[None, :]
        got = interaction_picture_terms(config).hamiltonian_at(t).dense()
        assert np.abs(got - expected).max() < 1e-12

    def test_kernel_view_matches_operator_view(self):
        config = LocalDrivenConfig(3, 1.0, 0.01, (LocalDrive(2, 3.6, 3.0),))
        terms = interaction_picture_terms(config)
        for t in (0.0, 0.61):
            dense = terms.hamiltonian_at(t).dense()
            assert np.abs(dense - dense_from_kernel(terms, t)).max() < 1e-13

    def test_frame_phases_start_at_identity(self):
        config = uniform_cosine_config(L=3)
        assert np.allclose(rotating_frame_phases(config, 0.0), 1.0)


class TestConfigFiles:
    def base_dict(self):
        return {
            "L": 3,
            "g": 1.0,
            "model": "bond_driven",
            "bonds": [
                {"kind": "cosine", "amplitude": 0.1, "frequency": 4.0},
                {"kind": "constant", "amplitude": 0.1},
            ],
            "initial": "duu",
            "dt": 0.01,
            "t_final": 5.0,
            "record_stride": 2,
        }

    def test_round_trip(self):
        config, settings = parse_config(self.base_dict())
        assert isinstance(config, BondDrivenConfig)
        assert config.bonds[0] == CosineSchedule(0.1, 4.0)
        assert config.initial == ("down", "up", "up")
        assert settings == RunSettings(0.01, 5.0, 2)
        again, again_settings = parse_config(config_to_dict(config, settings))
        assert again == config
        assert again_settings == settings

    def test_unknown_top_level_key(self):
        d = self.base_dict()
        d["tfinal"] = 1.0
        with pytest.raises(ConfigurationError, match="tfinal"):
            parse_config(d)

    def test_unknown_bond_key(self):
        d = self.base_dict()
        d["bonds"][0]["phase"] = 0.3
        with pytest.raises(ConfigurationError, match="phase"):
            parse_config(d)

    def test_bad_model(self):
        d = self.base_dict()
        d["model"] = "ring"
        with pytest.raises(ConfigurationError, match="model"):
            parse_config(d)

    def test_bad_initial_string(self):
        d = self.base_dict()
        d["initial"] = "dux"
        with pytest.raises(ConfigurationError):
            parse_config(d)

    def test_bond_count_mismatch(self):
        d = self.base_dict()
        d["bonds"] = d["bonds"][:1]
        with pytest.raises(ConfigurationError):
            parse_config(d)

    def test_local_driven_document(self):
        d = {
            "L": 9,
            "g": 1.0,
            "model": "local_driven",
            "bonds": [{"kind": "constant", "amplitude": 0.01}],
            "local_drives": [{"site": 5, "epsilon": 3.6, "nu": 3.0}],
        }
        config, settings = parse_config(d)
        assert isinstance(config, LocalDrivenConfig)
        assert config.lambda0 == 0.01
        assert config.drives == (LocalDrive(5, 3.6, 3.0),)
        assert settings.dt is None and settings.t_final is None

    def test_local_driven_rejects_modulated_bonds(self):
        d = {
            "L": 4,
            "g": 1.0,
            "model": "local_driven",
            "bonds": [{"kind": "cosine", "amplitude": 0.01, "frequency": 2.0}],
            "local_drives": [],
        }
        with pytest.raises(ConfigurationError):
            parse_config(d)

    def test_unknown_drive_key(self):
        d = {
            "L": 4,
            "g": 1.0,
            "model": "local_driven",
            "bonds": [{"kind": "constant", "amplitude": 0.01}],
            "local_drives": [{"site": 2, "epsilon": 1.0, "nu": 3.0, "shape": "sin"}],
        }
        with pytest.raises(ConfigurationError, match="shape"):
            parse_config(d)

    def test_settings_validated(self):
        with pytest.raises(ConfigurationError):
            RunSettings(dt=-0.1)
        with pytest.raises(ConfigurationError):
            RunSettings(record_stride=0)

    def test_json_file_round_trip(self, tmp_path):
        from spinswitch.model import load_config

        path = tmp_path / "chain.json"
        path.write_text(json.dumps(self.base_dict()))
        config, settings = load_config(path)
        assert config.L == 3 and settings.dt == 0.01
        bad = tmp_path / "broken.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigurationError):
            load_config(bad)
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "missing.json")
