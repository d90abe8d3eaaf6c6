"""Fock-basis Hamiltonians and design metrics for the inductively shunted junction.

The circuit is a Josephson junction (energy ``e_j``) shunted by a capacitance
(charging energy ``e_c``) and an inductance (inductive energy ``e_l``), with an
external flux ``phi_ext`` threading the junction-inductor loop:

    H = 4 e_c n^2 - e_j cos(phi + phi_ext) + e_l phi^2 / 2

All energies are frequencies in GHz (h = 1); ``phi_ext`` is in radians of the
reduced flux quantum.  Expanding in the number basis of the harmonic part
gives an exactly representable matrix on ``cutoff + 1`` Fock states:

    H = omega a'a - e_j [D(iA) e^{i phi_ext} + D(-iA) e^{-i phi_ext}] / 2

with omega = sqrt(8 e_c e_l), A = (2 e_c / e_l)^{1/4} and the displacement
operator D(alpha) = exp(alpha a' - conj(alpha) a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

__all__ = [
    "CircuitParams",
    "FockHamiltonian",
    "SpectrumResult",
    "QubitMetrics",
    "Valley",
    "displacement_matrix",
    "build_fock_hamiltonian",
    "exact_spectrum",
    "potential",
    "count_valleys",
    "has_dominant_valley",
    "qubit_metrics",
    "ladder_operator",
]


@dataclass(frozen=True)
class CircuitParams:
    """Design point of the shunted-junction circuit.

    e_c, e_j, e_l are the charging, Josephson and inductive energies in GHz;
    phi_ext is the external flux in radians (2*pi-periodic in its effect on
    the spectrum).
    """

    e_c: float
    e_j: float
    e_l: float
    phi_ext: float = 0.0

    def __post_init__(self):
        if not (self.e_c > 0.0):
            raise ValueError(f"e_c must be positive, got {self.e_c}")
        if not (self.e_l > 0.0):
            raise ValueError(f"e_l must be positive, got {self.e_l}")
        if self.e_j < 0.0:
            raise ValueError(f"e_j must be non-negative, got {self.e_j}")
        if not math.isfinite(self.phi_ext):
            raise ValueError(f"phi_ext must be finite, got {self.phi_ext}")

    @property
    def omega(self) -> float:
        """Harmonic transition frequency sqrt(8 e_c e_l), GHz."""
        return math.sqrt(8.0 * self.e_c * self.e_l)

    @property
    def amp_a(self) -> float:
        """Zero-point phase amplitude A = (2 e_c / e_l)^(1/4), dimensionless."""
        return (2.0 * self.e_c / self.e_l) ** 0.25

    def with_flux(self, phi_ext: float) -> "CircuitParams":
        return replace(self, phi_ext=phi_ext)

    def with_inductive(self, e_l: float) -> "CircuitParams":
        return replace(self, e_l=e_l)


@dataclass(frozen=True)
class FockHamiltonian:
    """Dense Hermitian circuit Hamiltonian on Fock states |0> .. |cutoff>."""

    params: CircuitParams
    cutoff: int
    matrix: np.ndarray
    omega: float
    amp_a: float

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True)
class SpectrumResult:
    """Lowest eigenvalues (ascending, GHz) and orthonormal eigenvector columns."""

    energies: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class QubitMetrics:
    """Qubit figures of merit extracted from the exact spectrum.

    f01 and f12 are the two lowest transition frequencies (GHz),
    anharmonicity = f12 - f01, flux_sensitivity = |d f01 / d phi_ext|
    (GHz/rad), and n_element / phi_element are the absolute 0-1 matrix
    elements of the charge and phase operators.
    """

    f01: float
    f12: float
    anharmonicity: float
    flux_sensitivity: float
    n_element: float
    phi_element: float


class Valley(NamedTuple):
    """A local minimum of the potential: location (rad) and value (GHz)."""

    phi: float
    depth: float


def displacement_matrix(alpha: complex, dim: int) -> np.ndarray:
    """Truncated Fock-basis matrix of D(alpha) = exp(alpha a' - conj(alpha) a).

    Matrix elements use the closed associated-Laguerre form

        <n+e|D|n> = sqrt(n!/(n+e)!) alpha^e e^{-|alpha|^2/2} L_n^{(e)}(|alpha|^2)

    (and the conjugate-reflected expression below the diagonal), so truncation
    only discards rows and columns instead of distorting the retained block
    the way exponentiating a truncated generator would.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    weight = math.exp(-0.5 * x)
    out = np.zeros((dim, dim), dtype=complex)
    for e in range(dim):
        n = np.arange(dim - e)
        band = np.exp(0.5 * (gammaln(n + 1) - gammaln(n + e + 1)))
        band = band * weight * eval_genlaguerre(n, e, x)
        if e == 0:
            out[n, n] = band
        else:
            out[n + e, n] = (alpha**e) * band
            out[n, n + e] = ((-alpha.conjugate()) ** e) * band
    return out


def ladder_operator(dim: int) -> np.ndarray:
    """Annihilation operator a with <n-1|a|n> = sqrt(n) on dim Fock states."""
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def build_fock_hamiltonian(params: CircuitParams, cutoff: int = 7) -> FockHamiltonian:
    """Build the circuit Hamiltonian on the lowest cutoff+1 Fock states.

    The default cutoff of 7 photons (8 levels) is the smallest truncation that
    fills three qubits; metrics calculations should use a larger one.
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")
    dim = cutoff + 1
    omega = params.omega
    amp_a = params.amp_a
    half = (
        0.5
        * params.e_j
        * complex(math.cos(params.phi_ext), math.sin(params.phi_ext))
        * displacement_matrix(1j * amp_a, dim)
    )
    matrix = np.diag(omega * np.arange(dim)).astype(complex) - (half + half.conj().T)
    return FockHamiltonian(params=params, cutoff=cutoff, matrix=matrix, omega=omega, amp_a=amp_a)


def _as_matrix(h) -> np.ndarray:
    return np.asarray(getattr(h, "matrix", h))


def exact_spectrum(h, k: int = 3) -> SpectrumResult:
    """Lowest k eigenvalues and eigenvectors of a Hermitian matrix, ascending."""
    matrix = _as_matrix(h)
    dim = matrix.shape[0]
    if not 1 <= k <= dim:
        raise ValueError(f"k must be in [1, {dim}], got {k}")
    energies, vectors = np.linalg.eigh(matrix)
    return SpectrumResult(energies=energies[:k].copy(), eigenvectors=vectors[:, :k].copy())


def potential(params: CircuitParams, phi):
    """Potential energy -e_j cos(phi + phi_ext) + e_l phi^2 / 2 in GHz.

    Accepts a scalar or array of phase values (radians).
    """
    phi = np.asarray(phi, dtype=float)
    value = -params.e_j * np.cos(phi + params.phi_ext) + 0.5 * params.e_l * phi**2
    return float(value) if value.ndim == 0 else value


def _potential_slope(params: CircuitParams, phi: float) -> float:
    return params.e_j * math.sin(phi + params.phi_ext) + params.e_l * phi


def count_valleys(
    params: CircuitParams,
    phi_range: tuple[float, float] = (-2.0 * math.pi, 4.0 * math.pi),
    grid_points: int = 2001,
) -> list[Valley]:
    """Local minima of the potential on phi_range, deepest first.

    A uniform scan brackets each interior minimum; bisection on the slope
    then pins the location to 1e-6 rad.
    """
    lo, hi = float(phi_range[0]), float(phi_range[1])
    if not lo < hi:
        raise ValueError(f"phi_range must be non-empty, got ({lo}, {hi})")
    if grid_points < 100:
        raise ValueError(f"grid_points must be >= 100, got {grid_points}")
    grid = np.linspace(lo, hi, grid_points)
    values = potential(params, grid)
    valleys: list[Valley] = []
    for i in range(1, grid_points - 1):
        if not (values[i] < values[i - 1] and values[i] < values[i + 1]):
            continue
        left, right = grid[i - 1], grid[i + 1]
        if _potential_slope(params, left) < 0.0 < _potential_slope(params, right):
            while right - left > 1e-6:
                mid = 0.5 * (left + right)
                if _potential_slope(params, mid) < 0.0:
                    left = mid
                else:
                    right = mid
        phi_min = float(0.5 * (left + right))
        valleys.append(Valley(phi=phi_min, depth=float(potential(params, phi_min))))
    valleys.sort(key=lambda v: v.depth)
    return valleys


def has_dominant_valley(valleys: list[Valley], margin: float) -> bool:
    """True when the deepest valley undercuts every other minimum by margin."""
    if not valleys:
        return False
    if len(valleys) == 1:
        return True
    return valleys[1].depth - valleys[0].depth >= margin


def qubit_metrics(
    params: CircuitParams, cutoff: int = 40, flux_step: float = 1e-3
) -> QubitMetrics:
    """Transition frequencies, flux sensitivity and 0-1 matrix elements.

    Uses exact diagonalization at the given cutoff (keep it well above the
    3-qubit encoding's 7 for converged numbers).  The flux sensitivity is a
    central difference of f01 with half-width flux_step, and the charge and
    phase operators are reconstructed from the ladder operators as
    n = i (a' - a) / (2 A), phi = A (a' + a).
    """
    if cutoff < 2:
        raise ValueError(f"cutoff must be >= 2 for three levels, got {cutoff}")
    if not flux_step > 0.0:
        raise ValueError(f"flux_step must be positive, got {flux_step}")
    ham = build_fock_hamiltonian(params, cutoff)
    spectrum = exact_spectrum(ham, 3)
    e0, e1, e2 = spectrum.energies
    f01 = float(e1 - e0)
    f12 = float(e2 - e1)

    def f01_at(phi_ext: float) -> float:
        energies = exact_spectrum(build_fock_hamiltonian(params.with_flux(phi_ext), cutoff), 2).energies
        return float(energies[1] - energies[0])

    sensitivity = abs(
        f01_at(params.phi_ext + flux_step) - f01_at(params.phi_ext - flux_step)
    ) / (2.0 * flux_step)

    a = ladder_operator(cutoff + 1)
    amp_a = params.amp_a
    n_op = 1j * (a.conj().T - a) / (2.0 * amp_a)
    phi_op = amp_a * (a.conj().T + a)
    v0 = spectrum.eigenvectors[:, 0]
    v1 = spectrum.eigenvectors[:, 1]
    return QubitMetrics(
        f01=f01,
        f12=f12,
        anharmonicity=f12 - f01,
        flux_sensitivity=float(sensitivity),
        n_element=float(abs(v0.conj() @ (n_op @ v1))),
        phi_element=float(abs(v0.conj() @ (phi_op @ v1))),
    )
