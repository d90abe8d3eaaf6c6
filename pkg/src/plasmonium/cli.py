"""Command-line front end for the qubit design toolkit.

Subcommands:
  spectrum   exact-diagonalization sweep over the inductive energy
  ssvqe      variational sweep with optional noise, shots and mitigation
  anticross  fine exact sweep plus minimum-gap location between two levels
  decompose  Gray-coded Pauli decomposition of one design point
  metrics    qubit metrics versus external flux at a high cutoff
  valleys    potential-valley analysis of one design point

Settings come from explicit flags, then a JSON or TOML config file given
with --config, then built-in defaults.  Every run is deterministic for a
fixed seed: rerunning a command writes byte-identical files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from .circuit import CircuitParams, build_fock_hamiltonian, count_valleys, has_dominant_valley, potential
from .encoding import encode_pauli
from .reports import (
    format_float,
    read_json_doc,
    read_sweep_csv,
    write_json_doc,
    write_metrics_csv,
    write_pauli_csv,
    write_sweep_csv,
    write_valleys_csv,
)
from .simulator import NoiseModel
from .ssvqe import SpsaConfig
from .sweep import (
    SweepConfig,
    find_anticrossing,
    run_metrics_sweep,
    run_spectrum_sweep,
    run_ssvqe_sweep,
    sweep_grid,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that exits with the invalid-config code on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


_COMMON = {
    "e_c": 0.7,
    "e_j": 4.5,
    "phi_ext": math.pi / 2,
    "cutoff": 7,
    "drop_tol": 1e-9,
    "seed": 0,
}
_SWEEP = {"e_l_start": 0.2, "e_l_stop": 3.0, "e_l_step": 0.1}
_SSVQE = {
    "iterations": 2000,
    "restarts": 5,
    "spsa_a": None,
    "spsa_c": None,
    "noise_1q": None,
    "noise_2q": None,
    "mitigate": False,
    "shots": None,
    "histories": False,
}
_DEFAULTS = {
    "spectrum": {**_COMMON, **_SWEEP},
    "ssvqe": {**_COMMON, **_SWEEP, **_SSVQE},
    "anticross": {**_COMMON, **_SWEEP, "e_l_step": 0.05, "level_lo": 1, "level_hi": 2},
    "decompose": {**_COMMON, "e_l": 0.5},
    "metrics": {
        "e_c": 0.7,
        "e_j": 4.5,
        "e_l": 2.2,
        "cutoff": 40,
        "flux_step": 1e-3,
        "phi_start": -math.pi,
        "phi_stop": math.pi,
        "phi_step": math.pi / 50,
        "seed": 0,
    },
    "valleys": {
        **_COMMON,
        "e_l": 0.2,
        "phi_min": -2.0 * math.pi,
        "phi_max": 4.0 * math.pi,
        "grid_points": 4001,
        "curve_points": 601,
    },
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="plasmonium", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, help="JSON or TOML config file")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--format", choices=("csv", "json", "both"), default="both")
        p.add_argument("--workers", type=int, default=1)

    def add_circuit(p):
        p.add_argument("--e-c", type=float, dest="e_c")
        p.add_argument("--e-j", type=float, dest="e_j")
        p.add_argument("--phi-ext", type=float, dest="phi_ext")
        p.add_argument("--cutoff", type=int)
        p.add_argument("--drop-tol", type=float, dest="drop_tol")

    def add_sweep(p):
        p.add_argument("--e-l-start", type=float, dest="e_l_start")
        p.add_argument("--e-l-stop", type=float, dest="e_l_stop")
        p.add_argument("--e-l-step", type=float, dest="e_l_step")

    p = sub.add_parser("spectrum", help="exact spectra over the sweep")
    add_common(p); add_circuit(p); add_sweep(p)

    p = sub.add_parser("ssvqe", help="variational sweep with optional noise")
    add_common(p); add_circuit(p); add_sweep(p)
    p.add_argument("--iterations", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--spsa-a", type=float, dest="spsa_a")
    p.add_argument("--spsa-c", type=float, dest="spsa_c")
    p.add_argument("--noise-1q", type=float, dest="noise_1q")
    p.add_argument("--noise-2q", type=float, dest="noise_2q")
    p.add_argument("--mitigate", action="store_true", default=None)
    p.add_argument("--shots", type=int)
    p.add_argument("--histories", action="store_true", default=None,
                   help="write per-point optimization history JSON files")

    p = sub.add_parser("anticross", help="fine exact sweep and minimum-gap location")
    add_common(p); add_circuit(p); add_sweep(p)
    p.add_argument("--level-lo", type=int, dest="level_lo")
    p.add_argument("--level-hi", type=int, dest="level_hi")

    p = sub.add_parser("decompose", help="Pauli decomposition at one design point")
    add_common(p); add_circuit(p)
    p.add_argument("--e-l", type=float, dest="e_l")

    p = sub.add_parser("metrics", help="qubit metrics versus external flux")
    add_common(p)
    p.add_argument("--e-c", type=float, dest="e_c")
    p.add_argument("--e-j", type=float, dest="e_j")
    p.add_argument("--e-l", type=float, dest="e_l")
    p.add_argument("--cutoff", type=int)
    p.add_argument("--flux-step", type=float, dest="flux_step")
    p.add_argument("--phi-start", type=float, dest="phi_start")
    p.add_argument("--phi-stop", type=float, dest="phi_stop")
    p.add_argument("--phi-step", type=float, dest="phi_step")

    p = sub.add_parser("valleys", help="potential-valley analysis")
    add_common(p); add_circuit(p)
    p.add_argument("--e-l", type=float, dest="e_l")
    p.add_argument("--phi-min", type=float, dest="phi_min")
    p.add_argument("--phi-max", type=float, dest="phi_max")
    p.add_argument("--grid-points", type=int, dest="grid_points")
    p.add_argument("--curve-points", type=int, dest="curve_points")

    return parser


def _load_config_file(path: Path) -> dict:
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ImportError:  # Python 3.10
            import tomli as tomllib
        try:
            return tomllib.loads(text)
        except Exception as exc:
            raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


def _merge_settings(args: argparse.Namespace, command: str) -> dict:
    """Apply the precedence: explicit flags > config file > defaults."""
    defaults = dict(_DEFAULTS[command])
    file_cfg = _load_config_file(args.config) if args.config else {}
    unknown = set(file_cfg) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown config keys for '{command}': {sorted(unknown)}")
    merged = {}
    for key, default in defaults.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            merged[key] = cli_value
        elif key in file_cfg:
            merged[key] = file_cfg[key]
        else:
            merged[key] = default
    return merged


def _sweep_config(settings: dict, command: str) -> SweepConfig:
    noise = None
    if settings.get("noise_1q") is not None or settings.get("noise_2q") is not None:
        noise = NoiseModel(
            depolarizing_prob_1q=settings.get("noise_1q") or 0.0,
            depolarizing_prob_2q=settings.get("noise_2q") or 0.0,
        )
    spsa_kwargs = {"iterations": settings.get("iterations", 2000), "seed": settings["seed"]}
    if settings.get("spsa_a") is not None:
        spsa_kwargs["a"] = settings["spsa_a"]
    if settings.get("spsa_c") is not None:
        spsa_kwargs["c"] = settings["spsa_c"]
    try:
        return SweepConfig(
            e_c=settings["e_c"],
            e_j=settings["e_j"],
            phi_ext=settings["phi_ext"],
            e_l_start=settings["e_l_start"],
            e_l_stop=settings["e_l_stop"],
            e_l_step=settings["e_l_step"],
            cutoff=settings["cutoff"],
            drop_tol=settings["drop_tol"],
            spsa=SpsaConfig(**spsa_kwargs),
            restarts=settings.get("restarts", 5),
            noise=noise,
            mitigate=bool(settings.get("mitigate")),
            shots=settings.get("shots"),
            seed=settings["seed"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _emit(out_dir: Path, stem: str, fmt: str, records, doc: dict) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        path = out_dir / f"{stem}.csv"
        write_sweep_csv(path, records)
        written.append(path)
    if fmt in ("json", "both"):
        path = out_dir / f"{stem}.json"
        write_json_doc(path, doc)
        written.append(path)
    return written


def _cmd_spectrum(args) -> int:
    settings = _merge_settings(args, "spectrum")
    config = _sweep_config({**settings, "iterations": 1}, "spectrum")
    records = run_spectrum_sweep(config, workers=args.workers)
    doc = {"config": config.to_json_dict(), "records": [r.to_json_dict() for r in records]}
    for path in _emit(args.out, "spectrum", args.format, records, doc):
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_anticross(args) -> int:
    settings = _merge_settings(args, "anticross")
    config = _sweep_config({**settings, "iterations": 1}, "anticross")
    records = run_spectrum_sweep(config, workers=args.workers)
    result = find_anticrossing(records, (settings["level_lo"], settings["level_hi"]))
    if not result.interior:
        print("warning: minimum gap sits on the sweep boundary; no interior refinement", file=sys.stderr)
    doc = {
        "config": config.to_json_dict(),
        "level_pair": [settings["level_lo"], settings["level_hi"]],
        "e_l_star": result.e_l,
        "min_gap": result.gap,
        "interior": result.interior,
        "records": [r.to_json_dict() for r in records],
    }
    for path in _emit(args.out, "anticross", args.format, records, doc):
        print(f"wrote {path}")
    print(f"minimum E{settings['level_hi']}-E{settings['level_lo']} gap "
          f"{format_float(result.gap)} GHz at E_L = {format_float(result.e_l)} GHz")
    return EXIT_OK


def _cmd_ssvqe(args) -> int:
    settings = _merge_settings(args, "ssvqe")
    config = _sweep_config(settings, "ssvqe")
    records, errors, histories = run_ssvqe_sweep(
        config, workers=args.workers, keep_histories=bool(settings["histories"])
    )
    doc = {"config": config.to_json_dict(), "records": [r.to_json_dict() for r in records]}
    for path in _emit(args.out, "ssvqe", args.format, records, doc):
        print(f"wrote {path}")
    if settings["histories"]:
        for e_l, result in sorted(histories.items()):
            path = args.out / f"ssvqe_history_el_{format_float(e_l)}.json"
            write_json_doc(path, result.to_json_dict())
            print(f"wrote {path}")
    if errors:
        log = args.out / "ssvqe_errors.log"
        log.write_text(
            "".join(f"e_l={format_float(e_l)}: {msg}\n" for e_l, msg in errors),
            encoding="utf-8",
        )
        print(f"{len(errors)} sweep point(s) failed; see {log}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_decompose(args) -> int:
    settings = _merge_settings(args, "decompose")
    params = CircuitParams(settings["e_c"], settings["e_j"], settings["e_l"], settings["phi_ext"])
    ham = build_fock_hamiltonian(params, settings["cutoff"])
    if ham.dim != 8:
        raise ConfigError(f"decompose requires cutoff 7 (3 qubits), got cutoff {settings['cutoff']}")
    pauli = encode_pauli(ham, settings["drop_tol"])
    gray = [i ^ (i >> 1) for i in range(8)]
    permuted = np.zeros((8, 8), dtype=complex)
    permuted[np.ix_(gray, gray)] = ham.matrix
    residual = float(np.abs(pauli.to_matrix() - permuted).max())
    doc = {
        "params": {"e_c": params.e_c, "e_j": params.e_j, "e_l": params.e_l, "phi_ext": params.phi_ext},
        "cutoff": settings["cutoff"],
        "drop_tol": settings["drop_tol"],
        "term_count": len(pauli),
        "reconstruction_residual": residual,
        "terms": pauli.to_json_obj(),
    }
    args.out.mkdir(parents=True, exist_ok=True)
    written = []
    if args.format in ("json", "both"):
        path = args.out / "decompose.json"
        write_json_doc(path, doc)
        written.append(path)
    if args.format in ("csv", "both"):
        path = args.out / "decompose.csv"
        write_pauli_csv(path, pauli.terms)
        written.append(path)
    for path in written:
        print(f"wrote {path}")
    print(f"{len(pauli)} Pauli terms, reconstruction residual {residual:.2e}")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    settings = _merge_settings(args, "metrics")
    params = CircuitParams(settings["e_c"], settings["e_j"], settings["e_l"], 0.0)
    span = settings["phi_stop"] - settings["phi_start"]
    if span < 0 or settings["phi_step"] <= 0:
        raise ConfigError("need phi_start <= phi_stop and phi_step > 0")
    count = int(round(span / settings["phi_step"])) + 1
    phis = [round(settings["phi_start"] + k * settings["phi_step"], 12) for k in range(count)]
    rows = run_metrics_sweep(params, phis, cutoff=settings["cutoff"], flux_step=settings["flux_step"])
    doc = {
        "params": {"e_c": params.e_c, "e_j": params.e_j, "e_l": params.e_l},
        "cutoff": settings["cutoff"],
        "flux_step": settings["flux_step"],
        "rows": [
            {
                "phi_ext": phi,
                "f01": m.f01,
                "f12": m.f12,
                "anharmonicity": m.anharmonicity,
                "flux_sensitivity": m.flux_sensitivity,
                "n_element": m.n_element,
                "phi_element": m.phi_element,
            }
            for phi, m in rows
        ],
    }
    args.out.mkdir(parents=True, exist_ok=True)
    written = []
    if args.format in ("csv", "both"):
        path = args.out / "metrics.csv"
        write_metrics_csv(path, rows)
        written.append(path)
    if args.format in ("json", "both"):
        path = args.out / "metrics.json"
        write_json_doc(path, doc)
        written.append(path)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_valleys(args) -> int:
    settings = _merge_settings(args, "valleys")
    params = CircuitParams(settings["e_c"], settings["e_j"], settings["e_l"], settings["phi_ext"])
    try:
        valleys = count_valleys(
            params, (settings["phi_min"], settings["phi_max"]), settings["grid_points"]
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    margin = params.e_j / 2.0
    curve_phi = np.linspace(settings["phi_min"], settings["phi_max"], settings["curve_points"])
    curve = potential(params, curve_phi)
    doc = {
        "params": {"e_c": params.e_c, "e_j": params.e_j, "e_l": params.e_l, "phi_ext": params.phi_ext},
        "valley_count": len(valleys),
        "dominant_margin": margin,
        "dominant_single_valley": has_dominant_valley(valleys, margin),
        "valleys": [{"phi": v.phi, "depth": v.depth} for v in valleys],
        "curve": {"phi": [float(x) for x in curve_phi], "potential": [float(x) for x in curve]},
    }
    args.out.mkdir(parents=True, exist_ok=True)
    written = []
    if args.format in ("json", "both"):
        path = args.out / "valleys.json"
        write_json_doc(path, doc)
        written.append(path)
    if args.format in ("csv", "both"):
        path = args.out / "valleys.csv"
        write_valleys_csv(path, valleys)
        written.append(path)
    for path in written:
        print(f"wrote {path}")
    print(f"{len(valleys)} valley(s); dominant single valley: {doc['dominant_single_valley']}")
    return EXIT_OK


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "ssvqe": _cmd_ssvqe,
    "anticross": _cmd_anticross,
    "decompose": _cmd_decompose,
    "metrics": _cmd_metrics,
    "valleys": _cmd_valleys,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - single CLI failure boundary
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
