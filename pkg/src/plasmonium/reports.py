"""Deterministic CSV and JSON emission for sweep results.

Floats are written with repr (shortest round-trip decimal), so reloading a
file reproduces the in-memory values bit for bit and reruns with the same
seed produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

from .sweep import SweepRecord

__all__ = [
    "SWEEP_CSV_HEADER",
    "METRICS_CSV_HEADER",
    "format_float",
    "write_json_doc",
    "read_json_doc",
    "write_sweep_csv",
    "read_sweep_csv",
    "write_metrics_csv",
    "write_pauli_csv",
    "write_valleys_csv",
]

SWEEP_CSV_SCHEMA = "# plasmonium sweep schema v1"
SWEEP_CSV_HEADER = (
    "e_l,exact_e0,exact_e1,exact_e2,vqe_e0,vqe_e1,vqe_e2,"
    "mit_e0,mit_e1,mit_e2,purity_0,purity_1,purity_2,"
    "term_count,iterations_used,seed"
)
METRICS_CSV_SCHEMA = "# plasmonium metrics schema v1"
METRICS_CSV_HEADER = "phi_ext,f01,f12,anharmonicity,flux_sensitivity,n_element,phi_element"
PAULI_CSV_SCHEMA = "# plasmonium pauli-terms schema v1"
VALLEYS_CSV_SCHEMA = "# plasmonium valleys schema v1"


def format_float(value) -> str:
    return repr(float(value))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return format_float(value)


def write_json_doc(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_json_doc(path: Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_sweep_csv(path: Path, records: list[SweepRecord]) -> None:
    lines = [SWEEP_CSV_SCHEMA, SWEEP_CSV_HEADER]
    for r in records:
        vqe = r.vqe_energies or (None, None, None)
        mit = r.mitigated_energies or (None, None, None)
        pur = r.purities or (None, None, None)
        cells = (
            [r.e_l, *r.exact_energies, *vqe, *mit, *pur]
            + [r.term_count, r.iterations_used, r.seed]
        )
        lines.append(",".join(_cell(c) for c in cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_sweep_csv(path: Path) -> list[SweepRecord]:
    lines = [
        line
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line and not line.startswith("#")
    ]
    records = []
    for line in lines[1:]:
        cells = line.split(",")

        def triple(start):
            chunk = cells[start : start + 3]
            if any(c == "" for c in chunk):
                return None
            return tuple(float(c) for c in chunk)

        records.append(
            SweepRecord(
                e_l=float(cells[0]),
                exact_energies=triple(1),
                vqe_energies=triple(4),
                mitigated_energies=triple(7),
                purities=triple(10),
                term_count=None if cells[13] == "" else int(cells[13]),
                iterations_used=int(cells[14]),
                seed=int(cells[15]),
            ).validate()
        )
    return records


def write_metrics_csv(path: Path, rows) -> None:
    lines = [METRICS_CSV_SCHEMA, METRICS_CSV_HEADER]
    for phi, m in rows:
        lines.append(
            ",".join(
                format_float(v)
                for v in (
                    phi,
                    m.f01,
                    m.f12,
                    m.anharmonicity,
                    m.flux_sensitivity,
                    m.n_element,
                    m.phi_element,
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_pauli_csv(path: Path, terms) -> None:
    lines = [PAULI_CSV_SCHEMA, "label,coeff"]
    for label, coeff in terms:
        lines.append(f"{label},{format_float(coeff)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_valleys_csv(path: Path, valleys) -> None:
    lines = [VALLEYS_CSV_SCHEMA, "phi,depth"]
    for v in valleys:
        lines.append(f"{format_float(v.phi)},{format_float(v.depth)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
