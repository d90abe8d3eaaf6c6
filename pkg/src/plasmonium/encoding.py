"""Gray-code relabeling of Fock levels and Pauli decomposition on 3 qubits.

The 8 lowest Fock states are assigned to computational basis states through
the binary-reflected Gray code, so neighbouring levels differ in a single
bit, and the relabeled Hamiltonian is expanded in the 64 tensor products of
single-qubit Pauli matrices.  Qubit 0 is the most significant bit of every
label, matching the simulator's amplitude ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

__all__ = [
    "PAULI_MATRICES",
    "PauliSum",
    "gray_code",
    "gray_decode",
    "encode_pauli",
    "pauli_matrix",
]

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def gray_value(index: int) -> int:
    """Binary-reflected Gray code of an integer: index XOR (index >> 1)."""
    return index ^ (index >> 1)


def gray_code(index: int, n: int) -> str:
    """Gray code of index as an n-bit string (qubit 0 = most significant)."""
    if not 0 <= index < (1 << n):
        raise ValueError(f"index must be in [0, {1 << n}), got {index}")
    return format(gray_value(index), f"0{n}b")


def gray_decode(bits: str) -> int:
    """Invert gray_code: gray_decode(gray_code(k, n)) == k."""
    if not bits or any(b not in "01" for b in bits):
        raise ValueError(f"bits must be a non-empty 0/1 string, got {bits!r}")
    value = int(bits, 2)
    shift = value >> 1
    while shift:
        value ^= shift
        shift >>= 1
    return value


@lru_cache(maxsize=256)
def pauli_matrix(label: str) -> np.ndarray:
    """Dense matrix of a tensor-product Pauli string such as 'XYI'."""
    if not label or any(c not in PAULI_MATRICES for c in label):
        raise ValueError(f"invalid Pauli label {label!r}")
    out = PAULI_MATRICES[label[0]]
    for c in label[1:]:
        out = np.kron(out, PAULI_MATRICES[c])
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class PauliSum:
    """Real-weighted sum of Pauli strings; coefficients in GHz."""

    terms: tuple[tuple[str, float], ...]
    qubit_count: int = 3

    def __post_init__(self):
        seen = set()
        for label, coeff in self.terms:
            if len(label) != self.qubit_count or any(c not in PAULI_MATRICES for c in label):
                raise ValueError(f"bad Pauli label {label!r} for {self.qubit_count} qubits")
            if label in seen:
                raise ValueError(f"duplicate Pauli label {label!r}")
            if not np.isfinite(coeff):
                raise ValueError(f"non-finite coefficient for {label!r}")
            seen.add(label)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def dim(self) -> int:
        return 1 << self.qubit_count

    def coefficient(self, label: str) -> float:
        for term_label, coeff in self.terms:
            if term_label == label:
                return coeff
        return 0.0

    def trace(self) -> float:
        """Trace of the dense form: only the all-identity string contributes."""
        return self.coefficient("I" * self.qubit_count) * self.dim

    def to_matrix(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for label, coeff in self.terms:
            out += coeff * pauli_matrix(label)
        return out

    def to_json_obj(self) -> list[dict]:
        return [{"label": label, "coeff": float(coeff)} for label, coeff in self.terms]

    @classmethod
    def from_json_obj(cls, obj, qubit_count: int = 3) -> "PauliSum":
        terms = tuple((rec["label"], float(rec["coeff"])) for rec in obj)
        return cls(terms=terms, qubit_count=qubit_count)


def encode_pauli(h, drop_tol: float = 1e-9) -> PauliSum:
    """Gray-relabel an 8x8 Hermitian matrix and expand it in Pauli strings.

    The relabeled matrix H' satisfies H'[g(i), g(j)] = H[i, j] with g the
    Gray code, so the three lowest Fock states land on computational states
    000, 001 and 011.  Coefficients are Tr(P H') / 8; strings with magnitude
    at or below drop_tol are discarded.  The retained sum reconstructs H'
    exactly up to the dropped residue.
    """
    matrix = np.asarray(getattr(h, "matrix", h))
    if matrix.shape != (8, 8):
        raise ValueError(f"encoding expects an 8x8 matrix (3 qubits), got {matrix.shape}")
    scale = max(1.0, float(np.abs(matrix).max()))
    if np.abs(matrix - matrix.conj().T).max() > 1e-10 * scale:
        raise ValueError("matrix must be Hermitian")

    gray = [gray_value(i) for i in range(8)]
    permuted = np.zeros_like(matrix, dtype=complex)
    permuted[np.ix_(gray, gray)] = matrix

    terms = []
    for chars in product("IXYZ", repeat=3):
        label = "".join(chars)
        coeff = np.einsum("ij,ji->", pauli_matrix(label), permuted) / 8.0
        if abs(coeff) > drop_tol:
            terms.append((label, float(coeff.real)))
    return PauliSum(terms=tuple(terms), qubit_count=3)
