"""Purity-based mitigation of depolarizing-type decoherence in energy estimates.

Models the prepared state as a globally depolarized pure state,
rho = p |psi><psi| + (1 - p) I / dim.  The purity Tr(rho^2) then determines
p in closed form, and the measured energy Tr(H rho) inverts to the
pure-state energy <psi|H|psi>.  The inversion is exact for this noise model
and a useful first-order correction for gate-local depolarizing noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["MitigationInput", "estimate_fidelity", "mitigate_energy"]

_PURITY_SLACK = 1e-10
_FIDELITY_FLOOR = 1e-6


@dataclass(frozen=True)
class MitigationInput:
    """One energy estimate with the state purity needed to correct it.

    e_measured and trace_h are in GHz; dim is the Hilbert-space dimension
    the state lives in (8 for the 3-qubit encoding).
    """

    e_measured: float
    purity: float
    trace_h: float
    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        low = 1.0 / self.dim
        if not (low - _PURITY_SLACK <= self.purity <= 1.0 + _PURITY_SLACK):
            raise ValueError(
                f"purity must lie in [1/dim, 1] = [{low}, 1], got {self.purity}"
            )


def estimate_fidelity(purity: float, dim: int) -> float:
    """Depolarizing-model fidelity p from a state purity.

    Solves Tr(rho^2) = p^2 + 2 p (1-p)/dim + (1-p)^2/dim, which collapses to
    purity = p^2 + (1 - p^2)/dim, so p = sqrt((purity - 1/dim)/(1 - 1/dim)).
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    low = 1.0 / dim
    if not (low - _PURITY_SLACK <= purity <= 1.0 + _PURITY_SLACK):
        raise ValueError(f"purity must lie in [1/dim, 1] = [{low}, 1], got {purity}")
    clipped = min(max(purity, low), 1.0)
    return math.sqrt((clipped - low) / (1.0 - low))


def mitigate_energy(data: MitigationInput) -> float:
    """Invert global depolarization on a measured energy.

    Under rho = p |psi><psi| + (1-p) I/dim the measured energy is
    p <psi|H|psi> + (1-p) Tr(H)/dim; this returns the <psi|H|psi> solving
    that relation.  States mixed to the point of a vanishing fidelity
    cannot be inverted and raise.
    """
    p = estimate_fidelity(data.purity, data.dim)
    if p < _FIDELITY_FLOOR:
        raise ValueError(
            f"state too mixed to invert: fidelity {p:.2e} below {_FIDELITY_FLOOR}"
        )
    return (data.e_measured - (1.0 - p) * data.trace_h / data.dim) / p
