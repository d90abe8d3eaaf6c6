"""Dense gate-level simulator for a few qubits.

Pure states evolve as statevectors, noisy circuits as density matrices with a
depolarizing channel applied to each gate's target qubits.  Amplitude index
bit 0 of qubit 0 is the most significant bit, matching the Pauli-label
ordering in :mod:`plasmonium.encoding`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .encoding import PauliSum, pauli_matrix

__all__ = [
    "SQRT_ISWAP",
    "StateVector",
    "DensityMatrix",
    "GateOp",
    "NoiseModel",
    "ry",
    "rz",
    "sqrt_iswap",
    "single_qubit_gate",
    "two_qubit_gate",
    "apply_gate",
    "apply_gate_noisy",
    "apply_circuit",
    "apply_circuit_noisy",
    "expectation",
    "purity",
    "sample_expectation",
]

SQRT_ISWAP = np.array(
    [
        [1, 0, 0, 0],
        [0, 1 / math.sqrt(2), 1j / math.sqrt(2), 0],
        [0, 1j / math.sqrt(2), 1 / math.sqrt(2), 0],
        [0, 0, 0, 1],
    ],
    dtype=complex,
)
SQRT_ISWAP.flags.writeable = False

_GATE_ARITY = {"ry": 1, "rz": 1, "u1": 1, "sqrt_iswap": 2, "u2": 2}


def _n_qubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim != 1 << n or n < 1:
        raise ValueError(f"dimension must be a power of two >= 2, got {dim}")
    return n


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state of an n-qubit register."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        _n_qubits(amps.size)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state vector must be normalized, |norm - 1| = {abs(norm - 1.0):.3e}")

    @property
    def n_qubits(self) -> int:
        return _n_qubits(self.amplitudes.size)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite n-qubit state."""

    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", rho)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got {rho.shape}")
        _n_qubits(rho.shape[0])
        if np.abs(rho - rho.conj().T).max() > 1e-12 * max(1.0, np.abs(rho).max()):
            raise ValueError("density matrix must be Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace must be 1, got {np.trace(rho).real!r}")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("density matrix must be positive semidefinite")

    @property
    def n_qubits(self) -> int:
        return _n_qubits(self.matrix.shape[0])

    @classmethod
    def from_statevector(cls, state: StateVector) -> "DensityMatrix":
        return cls(np.outer(state.amplitudes, state.amplitudes.conj()))


@dataclass(frozen=True)
class GateOp:
    """One gate: a named kind, its target qubits and optional angle/matrix."""

    kind: str
    targets: tuple[int, ...]
    angle: float | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in _GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        targets = tuple(int(q) for q in self.targets)
        object.__setattr__(self, "targets", targets)
        if len(targets) != _GATE_ARITY[self.kind]:
            raise ValueError(f"{self.kind} expects {_GATE_ARITY[self.kind]} targets, got {targets}")
        if len(set(targets)) != len(targets) or any(q < 0 for q in targets):
            raise ValueError(f"targets must be distinct and non-negative, got {targets}")
        if self.kind in ("ry", "rz"):
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} requires a finite angle")
        if self.kind in ("u1", "u2"):
            want = 2 ** _GATE_ARITY[self.kind]
            mat = np.asarray(self.matrix, dtype=complex)
            if mat.shape != (want, want):
                raise ValueError(f"{self.kind} requires a {want}x{want} matrix")
            if np.abs(mat.conj().T @ mat - np.eye(want)).max() > 1e-8:
                raise ValueError(f"{self.kind} matrix is not unitary")
            object.__setattr__(self, "matrix", mat)


def ry(qubit: int, angle: float) -> GateOp:
    return GateOp("ry", (qubit,), angle=float(angle))


def rz(qubit: int, angle: float) -> GateOp:
    return GateOp("rz", (qubit,), angle=float(angle))


@lru_cache(maxsize=None)
def sqrt_iswap(qubit_a: int, qubit_b: int) -> GateOp:
    return GateOp("sqrt_iswap", (qubit_a, qubit_b))


def single_qubit_gate(qubit: int, matrix: np.ndarray) -> GateOp:
    return GateOp("u1", (qubit,), matrix=matrix)


def two_qubit_gate(qubit_a: int, qubit_b: int, matrix: np.ndarray) -> GateOp:
    return GateOp("u2", (qubit_a, qubit_b), matrix=matrix)


@dataclass(frozen=True)
class NoiseModel:
    """Per-gate depolarizing probabilities for 1- and 2-qubit gates."""

    depolarizing_prob_1q: float = 0.0
    depolarizing_prob_2q: float = 0.0

    def __post_init__(self):
        for name in ("depolarizing_prob_1q", "depolarizing_prob_2q"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")

    def prob(self, n_targets: int) -> float:
        return self.depolarizing_prob_1q if n_targets == 1 else self.depolarizing_prob_2q


def gate_matrix(gate: GateOp) -> np.ndarray:
    """Dense 2x2 or 4x4 matrix of a gate on its own targets."""
    if gate.kind == "ry":
        c, s = math.cos(0.5 * gate.angle), math.sin(0.5 * gate.angle)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if gate.kind == "rz":
        phase = complex(math.cos(0.5 * gate.angle), math.sin(0.5 * gate.angle))
        return np.array([[phase.conjugate(), 0.0], [0.0, phase]], dtype=complex)
    if gate.kind == "sqrt_iswap":
        return SQRT_ISWAP
    return gate.matrix


@lru_cache(maxsize=None)
def _basis_permutation(order: tuple[int, ...], n: int) -> np.ndarray:
    """Index of each standard basis state in the (order...)-major kron basis."""
    idx = np.empty(1 << n, dtype=np.intp)
    for i in range(1 << n):
        v = 0
        for pos, q in enumerate(order):
            v |= ((i >> (n - 1 - q)) & 1) << (n - 1 - pos)
        idx[i] = v
    return idx


def _check_targets(gate: GateOp, n: int) -> None:
    if any(q >= n for q in gate.targets):
        raise ValueError(f"gate targets {gate.targets} out of range for {n} qubits")


def _embed(small: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """Lift a gate matrix on `targets` to the full 2^n-dimensional register."""
    rest = tuple(q for q in range(n) if q not in targets)
    full = np.kron(small, np.eye(1 << len(rest)))
    perm = _basis_permutation(targets + rest, n)
    return full[np.ix_(perm, perm)]


@lru_cache(maxsize=None)
def _embed_sqrt_iswap(targets: tuple[int, ...], n: int) -> np.ndarray:
    out = _embed(SQRT_ISWAP, targets, n)
    out.flags.writeable = False
    return out


def _full_matrix(gate: GateOp, n: int) -> np.ndarray:
    _check_targets(gate, n)
    if gate.kind == "sqrt_iswap":
        return _embed_sqrt_iswap(gate.targets, n)
    return _embed(gate_matrix(gate), gate.targets, n)


def _mix_targets(rhos: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """Replace the marginal on `targets` with the maximally mixed state.

    Works on a single density matrix or a leading batch axis.
    """
    batch = rhos.shape[:-2]
    nbatch = len(batch)
    keep = [q for q in range(n) if q not in targets]
    t = rhos.reshape(batch + (2,) * (2 * n))
    batch_labels = list(range(2 * n, 2 * n + nbatch))
    row = list(range(n))
    col = [q + n if q in keep else q for q in range(n)]
    out_labels = batch_labels + keep + [q + n for q in keep]
    reduced = np.einsum(t, batch_labels + row + col, out_labels)
    reduced = reduced.reshape(batch + (1 << len(keep), 1 << len(keep)))
    eye = np.eye(1 << len(targets), dtype=complex) / (1 << len(targets))
    full = np.einsum("ab,...ij->...aibj", eye, reduced).reshape(batch + (1 << n, 1 << n))
    perm = _basis_permutation(tuple(targets) + tuple(keep), n)
    return full[..., perm[:, None], perm[None, :]]


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    """Unitary action of one gate on a pure state."""
    full = _full_matrix(gate, state.n_qubits)
    return StateVector(full @ state.amplitudes)


def apply_gate_noisy(rho: DensityMatrix, gate: GateOp, noise: NoiseModel) -> DensityMatrix:
    """Unitary conjugation followed by depolarizing on the gate's targets."""
    n = rho.n_qubits
    full = _full_matrix(gate, n)
    out = full @ rho.matrix @ full.conj().T
    p = noise.prob(len(gate.targets))
    if p > 0.0:
        out = (1.0 - p) * out + p * _mix_targets(out, gate.targets, n)
    return DensityMatrix(out)


def apply_circuit(state: StateVector, gates) -> StateVector:
    for gate in gates:
        state = apply_gate(state, gate)
    return state


def apply_circuit_noisy(rho: DensityMatrix, gates, noise: NoiseModel) -> DensityMatrix:
    for gate in gates:
        rho = apply_gate_noisy(rho, gate, noise)
    return rho


def _propagate_columns(gates, block: np.ndarray, n: int) -> np.ndarray:
    """Push a (2^n, k) block of pure states through a circuit (no wrappers).

    Single-qubit gates act through a strided reshape instead of a full
    2^n-dimensional matrix; multi-qubit gates use the embedded form.
    """
    shape = block.shape
    size = block.size
    for gate in gates:
        if len(gate.targets) == 1:
            q = gate.targets[0]
            _check_targets(gate, n)
            lead = 1 << q
            block = (gate_matrix(gate) @ block.reshape(lead, 2, size // (2 * lead))).reshape(shape)
        else:
            block = _full_matrix(gate, n) @ block.reshape(shape)
    return block


def _conjugate_1q(rhos: np.ndarray, small: np.ndarray, q: int, n: int) -> np.ndarray:
    """rho -> U rho U' for a single-qubit unitary, batched, via strided matmul."""
    shape = rhos.shape
    dim = 1 << n
    tail = dim // (2 << q)
    out = small @ rhos.reshape(-1, 2, tail * dim)
    out = small.conj() @ out.reshape(-1, 2, tail)
    return out.reshape(shape)


def _depolarize_1q(rhos: np.ndarray, p: float, q: int, n: int) -> np.ndarray:
    """Blend in the channel replacing qubit q's marginal with I/2, batched."""
    dim = 1 << n
    lead = 1 << q
    tail = dim // (2 * lead)
    view = rhos.reshape(rhos.shape[:-2] + (lead, 2, tail, lead, 2, tail))
    out = (1.0 - p) * view
    avg = 0.5 * p * (view[..., :, 0, :, :, 0, :] + view[..., :, 1, :, :, 1, :])
    out[..., :, 0, :, :, 0, :] += avg
    out[..., :, 1, :, :, 1, :] += avg
    return out.reshape(rhos.shape)


def _propagate_density(gates, rhos: np.ndarray, noise: NoiseModel, n: int) -> np.ndarray:
    """Push a (k, 2^n, 2^n) batch of density matrices through a noisy circuit."""
    for gate in gates:
        if len(gate.targets) == 1:
            q = gate.targets[0]
            _check_targets(gate, n)
            rhos = _conjugate_1q(rhos, gate_matrix(gate), q, n)
            p = noise.prob(1)
            if p > 0.0:
                rhos = _depolarize_1q(rhos, p, q, n)
        else:
            full = _full_matrix(gate, n)
            rhos = np.einsum("ij,sjk,lk->sil", full, rhos, full.conj())
            p = noise.prob(len(gate.targets))
            if p > 0.0:
                rhos = (1.0 - p) * rhos + p * _mix_targets(rhos, gate.targets, n)
    return rhos


def expectation(state, observable: PauliSum) -> float:
    """Expectation value sum_P c_P <P>, term by term, in GHz."""
    if isinstance(state, StateVector):
        amps = state.amplitudes
        if amps.size != observable.dim:
            raise ValueError(f"dimension mismatch: state {amps.size}, observable {observable.dim}")
        total = 0.0 + 0.0j
        for label, coeff in observable.terms:
            total += coeff * np.vdot(amps, pauli_matrix(label) @ amps)
        return float(total.real)
    if isinstance(state, DensityMatrix):
        rho = state.matrix
        if rho.shape[0] != observable.dim:
            raise ValueError(f"dimension mismatch: state {rho.shape[0]}, observable {observable.dim}")
        total = 0.0 + 0.0j
        for label, coeff in observable.terms:
            total += coeff * np.einsum("ij,ji->", pauli_matrix(label), rho)
        return float(total.real)
    raise TypeError(f"expected StateVector or DensityMatrix, got {type(state).__name__}")


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2): 1 for pure states, 1/dim for the maximally mixed state."""
    return float(np.einsum("ij,ji->", rho.matrix, rho.matrix).real)


def sample_expectation(state: StateVector, observable: PauliSum, shots: int, seed: int) -> float:
    """Finite-shot estimate of expectation(state, observable).

    Each non-identity Pauli term is measured with `shots` independent
    two-outcome samples; identity terms contribute exactly.  Deterministic
    for a fixed seed and converging to the exact expectation as shots grows.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    amps = state.amplitudes
    if amps.size != observable.dim:
        raise ValueError(f"dimension mismatch: state {amps.size}, observable {observable.dim}")
    rng = np.random.default_rng(seed)
    identity = "I" * observable.qubit_count
    total = 0.0
    for label, coeff in observable.terms:
        if label == identity:
            total += coeff
            continue
        value = float(np.vdot(amps, pauli_matrix(label) @ amps).real)
        prob_plus = 0.5 * (1.0 + min(1.0, max(-1.0, value)))
        hits = rng.binomial(shots, prob_plus)
        total += coeff * (2.0 * hits / shots - 1.0)
    return total
