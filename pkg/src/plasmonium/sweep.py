"""Design-parameter sweeps: exact spectra, SSVQE runs, mitigation, analysis.

The inductive energy is stepped over a grid while the other circuit
parameters stay fixed; each grid point yields one SweepRecord.  Sweep points
are independent, deterministically seeded from the master seed, and may be
computed by parallel workers without changing any output value.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circuit import CircuitParams, build_fock_hamiltonian, exact_spectrum, qubit_metrics
from .encoding import PauliSum, encode_pauli
from .mitigation import MitigationInput, mitigate_energy
from .simulator import NoiseModel
from .ssvqe import SpsaConfig, SsvqeResult, run_ssvqe

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "AnticrossingResult",
    "sweep_grid",
    "run_spectrum_sweep",
    "run_ssvqe_sweep",
    "run_metrics_sweep",
    "find_anticrossing",
]

_BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class SweepConfig:
    """Grid and solver settings for an inductive-energy sweep.

    Defaults fix e_c = 0.7 GHz, e_j = 4.5 GHz, phi_ext = pi/2 and step the
    inductive energy from 0.2 to 3.0 GHz.
    """

    e_c: float = 0.7
    e_j: float = 4.5
    phi_ext: float = math.pi / 2
    e_l_start: float = 0.2
    e_l_stop: float = 3.0
    e_l_step: float = 0.1
    cutoff: int = 7
    drop_tol: float = 1e-9
    spsa: SpsaConfig = field(default_factory=SpsaConfig)
    restarts: int = 5
    noise: NoiseModel | None = None
    mitigate: bool = False
    shots: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.e_l_start > self.e_l_stop:
            raise ValueError(
                f"e_l_start must not exceed e_l_stop, got {self.e_l_start} > {self.e_l_stop}"
            )
        if self.e_l_step <= 0.0:
            raise ValueError(f"e_l_step must be positive, got {self.e_l_step}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.mitigate and self.noise is None:
            raise ValueError("mitigate requires a noise model")

    def params_at(self, e_l: float) -> CircuitParams:
        return CircuitParams(e_c=self.e_c, e_j=self.e_j, e_l=e_l, phi_ext=self.phi_ext)

    def to_json_dict(self) -> dict:
        return {
            "e_c": self.e_c,
            "e_j": self.e_j,
            "phi_ext": self.phi_ext,
            "e_l_start": self.e_l_start,
            "e_l_stop": self.e_l_stop,
            "e_l_step": self.e_l_step,
            "cutoff": self.cutoff,
            "drop_tol": self.drop_tol,
            "spsa": {
                "iterations": self.spsa.iterations,
                "a": self.spsa.a,
                "c": self.spsa.c,
                "alpha": self.spsa.alpha,
                "gamma": self.spsa.gamma,
                "big_a": self.spsa.big_a,
                "seed": self.spsa.seed,
            },
            "restarts": self.restarts,
            "noise": None
            if self.noise is None
            else {
                "depolarizing_prob_1q": self.noise.depolarizing_prob_1q,
                "depolarizing_prob_2q": self.noise.depolarizing_prob_2q,
            },
            "mitigate": self.mitigate,
            "shots": self.shots,
            "seed": self.seed,
        }


def sweep_grid(config: SweepConfig) -> list[float]:
    """Inductive-energy grid e_l_start + k * e_l_step, inclusive of the stop.

    Values are rounded to 12 decimals so accumulated float dust does not
    leak into output files or per-point seed keys.
    """
    span = config.e_l_stop - config.e_l_start
    count = int(round(span / config.e_l_step)) + 1
    grid = [round(config.e_l_start + k * config.e_l_step, 12) for k in range(count)]
    while grid and grid[-1] > config.e_l_stop + _BOUND_SLACK * max(1.0, config.e_l_stop):
        grid.pop()
    return grid


@dataclass(frozen=True)
class SweepRecord:
    """One sweep row: exact reference spectrum plus optional solver output."""

    e_l: float
    exact_energies: tuple[float, float, float]
    vqe_energies: tuple[float, float, float] | None = None
    mitigated_energies: tuple[float, float, float] | None = None
    purities: tuple[float, float, float] | None = None
    term_count: int | None = None
    iterations_used: int = 0
    seed: int = 0

    def validate(self) -> "SweepRecord":
        ex = self.exact_energies
        if not (ex[0] <= ex[1] <= ex[2]):
            raise ValueError(f"exact energies must be ascending, got {ex}")
        if self.vqe_energies is not None and self.purities is None:
            if self.vqe_energies[0] < ex[0] - 1e-9:
                raise ValueError(
                    f"noiseless VQE ground energy {self.vqe_energies[0]} "
                    f"below exact bound {ex[0]}"
                )
        for name in ("vqe_energies", "mitigated_energies", "purities", "exact_energies"):
            value = getattr(self, name)
            if value is not None and not all(math.isfinite(x) for x in value):
                raise ValueError(f"{name} contains non-finite entries: {value}")
        return self

    def to_json_dict(self) -> dict:
        return {
            "e_l": self.e_l,
            "exact_energies": list(self.exact_energies),
            "vqe_energies": None if self.vqe_energies is None else list(self.vqe_energies),
            "mitigated_energies": None
            if self.mitigated_energies is None
            else list(self.mitigated_energies),
            "purities": None if self.purities is None else list(self.purities),
            "term_count": self.term_count,
            "iterations_used": self.iterations_used,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SweepRecord":
        def triple(value):
            return None if value is None else tuple(float(x) for x in value)

        record = cls(
            e_l=float(obj["e_l"]),
            exact_energies=triple(obj["exact_energies"]),
            vqe_energies=triple(obj.get("vqe_energies")),
            mitigated_energies=triple(obj.get("mitigated_energies")),
            purities=triple(obj.get("purities")),
            term_count=None if obj.get("term_count") is None else int(obj["term_count"]),
            iterations_used=int(obj.get("iterations_used", 0)),
            seed=int(obj.get("seed", 0)),
        )
        return record.validate()


def _point_seeds(config: SweepConfig, count: int) -> np.ndarray:
    """Independent per-point seeds from the sweep and optimizer seeds."""
    return np.random.SeedSequence([config.seed, config.spsa.seed]).generate_state(max(count, 1))


def _exact_point(config: SweepConfig, e_l: float) -> SweepRecord:
    ham = build_fock_hamiltonian(config.params_at(e_l), config.cutoff)
    energies = exact_spectrum(ham, 3).energies
    term_count = None
    if ham.dim == 8:
        term_count = len(encode_pauli(ham, config.drop_tol))
    return SweepRecord(
        e_l=e_l,
        exact_energies=tuple(float(x) for x in energies),
        term_count=term_count,
    ).validate()


def run_spectrum_sweep(config: SweepConfig, workers: int = 1) -> list[SweepRecord]:
    """Exact-diagonalization sweep: the classical oracle for the design loop."""
    grid = sweep_grid(config)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_exact_point, [config] * len(grid), grid))
    return [_exact_point(config, e_l) for e_l in grid]


def _ssvqe_point(args: tuple[SweepConfig, float, int]) -> tuple[SweepRecord, SsvqeResult]:
    config, e_l, point_seed = args
    ham = build_fock_hamiltonian(config.params_at(e_l), config.cutoff)
    if ham.dim != 8:
        raise ValueError(f"SSVQE sweep needs the 3-qubit encoding (cutoff 7), got dim {ham.dim}")
    pauli = encode_pauli(ham, config.drop_tol)
    exact = exact_spectrum(ham, 3).energies
    spsa = dataclasses.replace(config.spsa, seed=point_seed)
    result = run_ssvqe(
        pauli,
        spsa,
        noise=config.noise,
        shots=config.shots,
        restarts=config.restarts,
    )
    mitigated = None
    if config.mitigate and result.purities is not None:
        trace_h = pauli.trace()
        mitigated = tuple(
            mitigate_energy(
                MitigationInput(e_measured=e, purity=p, trace_h=trace_h, dim=8)
            )
            for e, p in zip(result.energies, result.purities)
        )
    record = SweepRecord(
        e_l=e_l,
        exact_energies=tuple(float(x) for x in exact),
        vqe_energies=result.energies,
        mitigated_energies=mitigated,
        purities=result.purities,
        term_count=len(pauli),
        iterations_used=config.spsa.iterations,
        seed=point_seed,
    ).validate()
    return record, result


def run_ssvqe_sweep(
    config: SweepConfig, workers: int = 1, keep_histories: bool = False
) -> tuple[list[SweepRecord], list[tuple[float, str]], dict[float, SsvqeResult]]:
    """SSVQE sweep with optional noise and mitigation.

    Returns (records, errors, histories); a failed point is reported in
    `errors` as (e_l, message) and the sweep continues.  Histories are only
    retained when keep_histories is set.
    """
    grid = sweep_grid(config)
    point_seeds = _point_seeds(config, len(grid))
    payloads = [(config, e_l, int(point_seeds[i])) for i, e_l in enumerate(grid)]
    records: list[SweepRecord] = []
    errors: list[tuple[float, str]] = []
    histories: dict[float, SsvqeResult] = {}

    def consume(e_l, outcome, failure):
        if failure is not None:
            errors.append((e_l, failure))
            return
        record, result = outcome
        records.append(record)
        if keep_histories:
            histories[e_l] = result

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_ssvqe_point, payload) for payload in payloads]
            for payload, future in zip(payloads, futures):
                try:
                    consume(payload[1], future.result(), None)
                except Exception as exc:  # noqa: BLE001 - per-point error log
                    consume(payload[1], None, f"{type(exc).__name__}: {exc}")
    else:
        for payload in payloads:
            try:
                consume(payload[1], _ssvqe_point(payload), None)
            except Exception as exc:  # noqa: BLE001 - per-point error log
                consume(payload[1], None, f"{type(exc).__name__}: {exc}")
    return records, errors, histories


def run_metrics_sweep(
    params: CircuitParams,
    phi_values,
    cutoff: int = 40,
    flux_step: float = 1e-3,
) -> list[tuple[float, "QubitMetrics"]]:
    """Qubit metrics across external-flux values at a high cutoff."""
    rows = []
    for phi in phi_values:
        rows.append((float(phi), qubit_metrics(params.with_flux(float(phi)), cutoff, flux_step)))
    return rows


@dataclass(frozen=True)
class AnticrossingResult:
    """Location and size of the minimum gap between two levels.

    `interior` is False when the raw minimum sits on the sweep boundary, in
    which case no parabolic refinement is possible and the grid values are
    returned as-is.
    """

    e_l: float
    gap: float
    interior: bool


def find_anticrossing(
    records: list[SweepRecord], level_pair: tuple[int, int] = (1, 2)
) -> AnticrossingResult:
    """Minimum exact-energy gap over a sweep, parabolic-refined off the grid.

    Records must be sorted by e_l; the gap is taken between the two exact
    energy levels in level_pair (default: first and second excited states).
    """
    if len(records) < 3:
        raise ValueError(f"need at least 3 records, got {len(records)}")
    lo, hi = level_pair
    e_l = np.array([r.e_l for r in records])
    if not np.all(np.diff(e_l) > 0):
        raise ValueError("records must be sorted by strictly increasing e_l")
    gaps = np.array([r.exact_energies[hi] - r.exact_energies[lo] for r in records])
    i = int(np.argmin(gaps))
    if i == 0 or i == len(records) - 1:
        return AnticrossingResult(e_l=float(e_l[i]), gap=float(gaps[i]), interior=False)
    x = e_l[i - 1 : i + 2]
    y = gaps[i - 1 : i + 2]
    denom = (x[1] - x[0]) * (y[1] - y[2]) - (x[1] - x[2]) * (y[1] - y[0])
    if abs(denom) < 1e-30:
        return AnticrossingResult(e_l=float(x[1]), gap=float(y[1]), interior=True)
    x_star = x[1] - 0.5 * (
        (x[1] - x[0]) ** 2 * (y[1] - y[2]) - (x[1] - x[2]) ** 2 * (y[1] - y[0])
    ) / denom
    coeffs = np.polyfit(x, y, 2)
    gap_star = float(np.polyval(coeffs, x_star))
    return AnticrossingResult(e_l=float(x_star), gap=gap_star, interior=True)
