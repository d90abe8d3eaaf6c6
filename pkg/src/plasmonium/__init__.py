"""Design toolkit for inductively shunted transmon-style qubits.

Builds truncated Fock-basis circuit Hamiltonians, encodes them onto three
qubits through a Gray-coded Pauli decomposition, solves for the lowest three
levels with a subspace-search VQE driven by SPSA on a small noisy-gate
simulator, applies purity-based error mitigation, and sweeps the inductive
energy to map out the plasmon-transition anti-crossing and qubit metrics.
"""

from .circuit import (
    CircuitParams,
    FockHamiltonian,
    QubitMetrics,
    SpectrumResult,
    Valley,
    build_fock_hamiltonian,
    count_valleys,
    displacement_matrix,
    exact_spectrum,
    has_dominant_valley,
    potential,
    qubit_metrics,
)
from .encoding import PauliSum, encode_pauli, gray_code, gray_decode
from .mitigation import MitigationInput, estimate_fidelity, mitigate_energy
from .simulator import (
    DensityMatrix,
    GateOp,
    NoiseModel,
    StateVector,
    apply_circuit,
    apply_circuit_noisy,
    apply_gate,
    apply_gate_noisy,
    expectation,
    purity,
    sample_expectation,
)
from .ssvqe import (
    SpsaConfig,
    SsvqeResult,
    build_ansatz,
    cost_function,
    run_ssvqe,
    spsa_minimize,
)
from .sweep import (
    AnticrossingResult,
    SweepConfig,
    SweepRecord,
    find_anticrossing,
    run_metrics_sweep,
    run_spectrum_sweep,
    run_ssvqe_sweep,
    sweep_grid,
)

__version__ = "0.1.0"
