"""Cavity QED simulator for photon-mediated joint excitation of two atoms.

A single cavity photon, a photon pair, or a classical pump coherently and
reversibly excites two dispersively coupled atoms at once.  The package
builds the full multi-level rotating-wave Hamiltonians, derives the
effective third-order pair couplings both analytically and mechanically,
integrates unitary and dissipative dynamics, and extracts the two-qubit
correlation signatures of the process.
"""

from .errors import (
    ConfigError,
    DimensionMismatchError,
    IntegrationError,
    ScanError,
    SimError,
    SingularDetuningError,
)
from .operators import (
    DimSignature,
    OperatorMatrix,
    QuantumState,
    commutator,
    dagger,
    destroy,
    eig_herm,
    embed,
    expectation,
    identity,
    transition,
)
from .model import (
    AtomSpec,
    CavitySpec,
    DriveSpec,
    SystemSpec,
    bare_index,
    bare_state,
    build_collapse_channels,
    build_drive_terms,
    build_static_hamiltonian,
    dim_signature,
    excitation_number_candidate,
    load_config,
    spec_from_config,
    spec_to_config,
    superposition,
)
from .effective import (
    Detunings,
    EffectiveParams,
    bch_effective,
    build_effective_hamiltonian,
    chi_circuit,
    chi_drive,
    chi_drive_of,
    chi_lambda,
    chi_of,
    chi_vee,
    detunings_circuit,
    detunings_lambda,
    detunings_of,
    detunings_vee,
    effective_params,
    family_of,
    generator_residual,
    matching_guess,
    renormalized_frequencies,
    secular_filter,
    split_hamiltonian,
    sw_generator,
)
from .dynamics import (
    SolverOptions,
    TimeGrid,
    Trajectory,
    evolve_lindblad,
    evolve_schrodinger,
    propagator_expm,
)
from .observables import (
    g2_qubits,
    leakage,
    mean_photon,
    population,
    qubit_excitation,
    standard_observables,
    state_fidelity,
)
from .scan import ScanResult, scan_cavity_frequency, scan_drive_frequency
from .presets import preset_config, preset_names, write_preset

__version__ = "0.1.0"
