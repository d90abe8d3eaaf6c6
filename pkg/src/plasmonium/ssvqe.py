"""Subspace-search VQE on three qubits with an SPSA optimizer.

One shared variational circuit is applied to the three orthogonal input
states 000, 001 and 011 (the Gray images of the three lowest Fock levels),
and the weighted energy sum 5 E0 + 4 E1 + 2 E2 is minimized.  Because the
weights decrease, the global minimum aligns the outputs with the three
lowest eigenstates at once.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from .encoding import PauliSum
from .simulator import (
    GateOp,
    NoiseModel,
    StateVector,
    _propagate_columns,
    _propagate_density,
    ry,
    rz,
    sample_expectation,
    sqrt_iswap,
)

__all__ = [
    "N_ANSATZ_PARAMS",
    "COST_WEIGHTS",
    "INITIAL_BASIS_STATES",
    "ENTANGLER_PAIRS",
    "TRANSPARENT_ANGLES",
    "RESTART_JITTERS",
    "SpsaConfig",
    "SpsaResult",
    "CostValue",
    "SsvqeResult",
    "build_ansatz",
    "cost_function",
    "spsa_minimize",
    "run_ssvqe",
]

N_ANSATZ_PARAMS = 26
COST_WEIGHTS = (5.0, 4.0, 2.0)
INITIAL_BASIS_STATES = (0, 1, 3)
ENTANGLER_PAIRS = ((0, 1), (1, 2), (0, 1), (1, 2), (0, 1))
_N_QUBITS = 3

# Angle setting at which the circuit transmits the three input basis states
# with ~99% fidelity each (the entanglers cannot be switched off, so angle
# zero is NOT a pass-through; this configuration is the numerical maximum of
# the summed transmission |<b_i|U|b_i>|^2 over the three inputs).  Restarts
# are seeded from here with widening jitter.
TRANSPARENT_ANGLES = np.array([
    -1.2053200525497194, 1.476029666171243,
    -1.5323469715156632, 0.7750497358857169,
    -1.1696552332427144, 2.6155921499160506,
    -2.255466589100166, 2.2735556194602884,
    -0.8905028127315302, -0.9786816195282197,
    0.6622512964724905, -2.111138574138947,
    0.5241463818677303, 0.49739171486282174,
    -0.9588177852581619, 2.2177176064091793,
    -2.39734173232644, 1.0010172902653798,
    2.452918517571537, 0.9967270182166006,
    -1.9917015976098846, -2.7797782921181966,
    1.0785482986173847, 2.018956282066334,
    -0.7109291240703977, -2.1601651031824254,
])
TRANSPARENT_ANGLES.flags.writeable = False

# Per-restart jitter half-widths around the transparent configuration; the
# last entry repeats for any additional restarts (essentially random starts).
RESTART_JITTERS = (0.05, 0.2, 0.5, 1.0, np.pi)


def _as_angles(params) -> np.ndarray:
    angles = np.asarray(params, dtype=float).reshape(-1)
    if angles.size != N_ANSATZ_PARAMS:
        raise ValueError(f"ansatz takes {N_ANSATZ_PARAMS} angles, got {angles.size}")
    return angles


def build_ansatz(params) -> list[GateOp]:
    """Fixed-layout variational circuit consuming exactly 26 angles.

    Layout: a front layer of RY, RZ on each qubit (angles 0-5, qubit order
    0, 1, 2), then five entangling blocks on the alternating pairs
    (0,1), (1,2), (0,1), (1,2), (0,1).  Each block is one sqrt-iSWAP on the
    pair followed by RY, RZ on the first pair qubit and RY, RZ on the
    second (four angles per block, consumed in that order).
    """
    angles = _as_angles(params)
    gates: list[GateOp] = []
    k = 0
    for q in range(_N_QUBITS):
        gates.append(ry(q, angles[k]))
        gates.append(rz(q, angles[k + 1]))
        k += 2
    for qa, qb in ENTANGLER_PAIRS:
        gates.append(sqrt_iswap(qa, qb))
        gates.append(ry(qa, angles[k]))
        gates.append(rz(qa, angles[k + 1]))
        gates.append(ry(qb, angles[k + 2]))
        gates.append(rz(qb, angles[k + 3]))
        k += 4
    return gates


@lru_cache(maxsize=64)
def _dense_hamiltonian(hamiltonian: PauliSum) -> np.ndarray:
    out = hamiltonian.to_matrix()
    out.flags.writeable = False
    return out


class CostValue(NamedTuple):
    cost: float
    energies: tuple[float, float, float]
    purities: tuple[float, float, float] | None


def cost_function(
    params,
    hamiltonian: PauliSum,
    noise: NoiseModel | None = None,
    shots: int | None = None,
    seed: int = 0,
) -> CostValue:
    """Weighted three-state energy cost 5 E0 + 4 E1 + 2 E2.

    The same ansatz circuit acts on the basis states 000, 001 and 011; E_i
    is the Hamiltonian expectation of output state i.  With a noise model
    the states evolve as density matrices and their purities are returned;
    with `shots` each expectation is estimated from finite sampling
    (pure-state path only).
    """
    if hamiltonian.qubit_count != _N_QUBITS:
        raise ValueError(f"expected a {_N_QUBITS}-qubit Hamiltonian, got {hamiltonian.qubit_count}")
    if noise is not None and shots is not None:
        raise ValueError("shot sampling is only supported on the noiseless path")
    gates = build_ansatz(params)
    dim = 1 << _N_QUBITS
    dense = _dense_hamiltonian(hamiltonian)

    if noise is None:
        block = np.zeros((dim, len(INITIAL_BASIS_STATES)), dtype=complex)
        for col, index in enumerate(INITIAL_BASIS_STATES):
            block[index, col] = 1.0
        block = _propagate_columns(gates, block, _N_QUBITS)
        if shots is None:
            energies = tuple(
                float(np.vdot(block[:, col], dense @ block[:, col]).real) for col in range(3)
            )
        else:
            term_seeds = np.random.SeedSequence(seed).generate_state(3)
            energies = tuple(
                sample_expectation(StateVector(block[:, col]), hamiltonian, shots, int(term_seeds[col]))
                for col in range(3)
            )
        purities = None
    else:
        rhos = np.zeros((len(INITIAL_BASIS_STATES), dim, dim), dtype=complex)
        for col, index in enumerate(INITIAL_BASIS_STATES):
            rhos[col, index, index] = 1.0
        rhos = _propagate_density(gates, rhos, noise, _N_QUBITS)
        energies = tuple(np.einsum("ij,sji->s", dense, rhos).real.tolist())
        purities = tuple(np.einsum("sij,sji->s", rhos, rhos).real.tolist())

    cost = sum(w * e for w, e in zip(COST_WEIGHTS, energies))
    return CostValue(cost=float(cost), energies=energies, purities=purities)


@dataclass(frozen=True)
class SpsaConfig:
    """Gain schedule and budget for the simultaneous-perturbation optimizer.

    Step sizes follow a_k = a / (k + 1 + big_a)^alpha and perturbation sizes
    c_k = c / (k + 1)^gamma; big_a defaults to iterations / 10.  The default
    gamma decays the perturbation fast, which suits noiseless objectives;
    with shot noise a slower decay such as 0.101 is the better choice.
    """

    iterations: int = 2000
    a: float = 0.12
    c: float = 0.1
    alpha: float = 0.602
    gamma: float = 0.35
    big_a: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not (self.a > 0.0 and self.c > 0.0):
            raise ValueError(f"gains a and c must be positive, got a={self.a}, c={self.c}")
        if not (0.0 < self.gamma < self.alpha <= 1.0):
            raise ValueError(f"need 0 < gamma < alpha <= 1, got alpha={self.alpha}, gamma={self.gamma}")
        if self.big_a is not None and self.big_a < 0.0:
            raise ValueError(f"big_a must be non-negative, got {self.big_a}")

    @property
    def stability(self) -> float:
        return self.big_a if self.big_a is not None else self.iterations / 10.0


class SpsaResult(NamedTuple):
    params: np.ndarray
    value: float
    evaluations: np.ndarray  # (iterations, 2): the +/- probe values per step


def spsa_minimize(
    objective: Callable[[np.ndarray], float], initial, config: SpsaConfig
) -> SpsaResult:
    """Minimize a scalar objective with two evaluations per iteration.

    Each step estimates the full gradient from a single Rademacher
    perturbation: g_i = [f(t + c_k d) - f(t - c_k d)] / (2 c_k d_i).  The
    returned parameters are the lowest-scoring iterate seen, not merely the
    final one, where each iterate's score is the mean of its two probe
    values (the probes are the only evaluations made).
    """
    theta = np.array(initial, dtype=float).reshape(-1)
    rng = np.random.default_rng(config.seed)
    evaluations = np.empty((config.iterations, 2), dtype=float)
    best_theta = theta.copy()
    best_value = np.inf
    stability = config.stability
    for k in range(config.iterations):
        a_k = config.a / (k + 1 + stability) ** config.alpha
        c_k = config.c / (k + 1) ** config.gamma
        delta = rng.integers(0, 2, size=theta.size).astype(float) * 2.0 - 1.0
        theta_plus = theta + c_k * delta
        theta_minus = theta - c_k * delta
        f_plus = float(objective(theta_plus))
        f_minus = float(objective(theta_minus))
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            raise RuntimeError(
                f"SPSA aborted: non-finite objective at iteration {k} "
                f"(f+={f_plus!r}, f-={f_minus!r})"
            )
        evaluations[k, 0] = f_plus
        evaluations[k, 1] = f_minus
        score = 0.5 * (f_plus + f_minus)
        if score < best_value:
            best_value, best_theta = score, theta.copy()
        theta = theta - a_k * (f_plus - f_minus) / (2.0 * c_k) * delta
    return SpsaResult(params=best_theta, value=best_value, evaluations=evaluations)


@dataclass(frozen=True)
class SsvqeResult:
    """Outcome of an SSVQE run: best energies, parameters and histories.

    cost_history and energy_history hold, per iteration, the mean of the two
    SPSA probe evaluations of the winning restart.  Purities are per final
    state and only present for noisy runs.
    """

    energies: tuple[float, float, float]
    cost: float
    optimal_params: np.ndarray
    cost_history: np.ndarray
    energy_history: np.ndarray
    purities: tuple[float, float, float] | None
    best_restart: int
    restarts: int
    config: SpsaConfig

    def to_json_dict(self) -> dict:
        return {
            "energies": list(self.energies),
            "cost": self.cost,
            "optimal_params": [float(x) for x in self.optimal_params],
            "cost_history": [float(x) for x in self.cost_history],
            "energy_history": [[float(x) for x in row] for row in self.energy_history],
            "purities": None if self.purities is None else list(self.purities),
            "best_restart": self.best_restart,
            "restarts": self.restarts,
            "config": {
                "iterations": self.config.iterations,
                "a": self.config.a,
                "c": self.config.c,
                "alpha": self.config.alpha,
                "gamma": self.config.gamma,
                "big_a": self.config.big_a,
                "seed": self.config.seed,
            },
        }


class _RecordingObjective:
    """Wrap cost_function, remembering every (cost, energies) evaluation."""

    def __init__(self, hamiltonian, noise, shots, shot_seed):
        self.hamiltonian = hamiltonian
        self.noise = noise
        self.shots = shots
        self._shot_rng = np.random.default_rng(shot_seed)
        self.records: list[tuple[float, float, float, float]] = []

    def __call__(self, params) -> float:
        seed = int(self._shot_rng.integers(2**63)) if self.shots is not None else 0
        value = cost_function(params, self.hamiltonian, self.noise, self.shots, seed=seed)
        self.records.append((value.cost, *value.energies))
        return value.cost


def run_ssvqe(
    hamiltonian: PauliSum,
    spsa: SpsaConfig | None = None,
    noise: NoiseModel | None = None,
    shots: int | None = None,
    restarts: int = 5,
) -> SsvqeResult:
    """Best-of-`restarts` SPSA optimization of the three-state cost.

    Restart r draws its initial angles uniformly from a box of half-width
    RESTART_JITTERS[r] around the transparent configuration, and its own
    perturbation stream; both derive deterministically from the config
    seed.  The restart whose re-evaluated best parameters give the lowest
    cost wins; its probe history is returned.
    """
    if spsa is None:
        spsa = SpsaConfig()
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    children = np.random.SeedSequence(spsa.seed).spawn(restarts)
    best: SsvqeResult | None = None
    for index, child in enumerate(children):
        init_seq, spsa_seq, shot_seq = child.spawn(3)
        width = RESTART_JITTERS[min(index, len(RESTART_JITTERS) - 1)]
        initial = TRANSPARENT_ANGLES + np.random.default_rng(init_seq).uniform(
            -width, width, N_ANSATZ_PARAMS
        )
        objective = _RecordingObjective(hamiltonian, noise, shots, shot_seq)
        run = spsa_minimize(
            objective,
            initial,
            dataclasses.replace(spsa, seed=int(spsa_seq.generate_state(1)[0])),
        )
        final = cost_function(run.params, hamiltonian, noise, shots, seed=index)
        records = np.asarray(objective.records, dtype=float).reshape(-1, 4)
        per_iteration = 0.5 * (records[0::2] + records[1::2])
        candidate = SsvqeResult(
            energies=final.energies,
            cost=final.cost,
            optimal_params=run.params,
            cost_history=per_iteration[:, 0].copy(),
            energy_history=per_iteration[:, 1:].copy(),
            purities=final.purities,
            best_restart=index,
            restarts=restarts,
            config=spsa,
        )
        if best is None or candidate.cost < best.cost:
            best = candidate
    return best
