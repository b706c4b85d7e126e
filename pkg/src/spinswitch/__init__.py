"""Driven transverse-field Ising chains: spin-wave switches and effective Hamiltonians."""

from .bessel import bessel_j
from .control import ControlFunction, control_average, control_value
from .errors import (
    ConfigurationError,
    DomainError,
    FrontNotCapturedError,
    NumericalFailureError,
    UnsupportedConfigurationError,
)
from .evolve import (
    Propagator,
    Trajectory,
    evolve,
    evolve_terms,
    one_period_propagator,
    stroboscopic_evolve,
)
from .floquet import (
    MagnusResult,
    analytic_hf0,
    magnus_expansion,
    magnus_order0,
    magnus_order1,
    rwa_local_effective,
)
from .hilbert import (
    HilbertSpace,
    QuantumState,
    SparseOperator,
    all_up_state,
    apply,
    expectation,
    product_state,
    site_operator,
    two_site_coupling,
)
from .model import (
    BesselControlledSchedule,
    BondDrivenConfig,
    ConstantSchedule,
    CosineSchedule,
    LocalDrive,
    LocalDrivenConfig,
    RunSettings,
    assemble_hamiltonian,
    config_to_dict,
    initial_state,
    interaction_picture_terms,
    load_config,
    parse_config,
    rotating_frame_phases,
    stroboscopic_period,
)
from .observables import (
    FrontFit,
    SwitchVerdict,
    ansatz_amplitudes,
    classify_switch,
    connected_correlation,
    front_fit,
)
from .scenarios import (
    SCENARIO_NAMES,
    ScenarioOutcome,
    SweepResult,
    run_scenario,
    sweep_switch,
)

__version__ = "0.1.0"
