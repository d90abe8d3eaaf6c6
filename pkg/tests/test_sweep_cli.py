import json
import math

import numpy as np
import pytest

from plasmonium.cli import main
from plasmonium.reports import read_json_doc, read_sweep_csv, write_json_doc, write_sweep_csv
from plasmonium.simulator import NoiseModel
from plasmonium.ssvqe import SpsaConfig
from plasmonium.sweep import (
    AnticrossingResult,
    SweepConfig,
    SweepRecord,
    find_anticrossing,
    run_spectrum_sweep,
    run_ssvqe_sweep,
    sweep_grid,
)


def tiny_ssvqe_config(**overrides):
    base = dict(
        e_l_start=0.8,
        e_l_stop=1.0,
        e_l_step=0.1,
        spsa=SpsaConfig(iterations=40, seed=0),
        restarts=2,
        seed=11,
    )
    base.update(overrides)
    return SweepConfig(**base)


class TestConfigAndGrid:
    def test_default_grid_has_29_rows(self):
        assert len(sweep_grid(SweepConfig())) == 29

    def test_fine_grid_has_57_rows(self):
        assert len(sweep_grid(SweepConfig(e_l_step=0.05))) == 57

    def test_single_point_sweep(self):
        grid = sweep_grid(SweepConfig(e_l_start=1.3, e_l_stop=1.3, e_l_step=0.1))
        assert grid == [1.3]

    def test_grid_values_clean(self):
        grid = sweep_grid(SweepConfig())
        assert 0.3 in grid and 2.9 in grid

    def test_validation(self):
        with pytest.raises(ValueError):
            SweepConfig(e_l_start=2.0, e_l_stop=1.0)
        with pytest.raises(ValueError):
            SweepConfig(e_l_step=0.0)
        with pytest.raises(ValueError):
            SweepConfig(mitigate=True)  # mitigation needs noise


class TestSpectrumSweep:
    def test_rows_and_term_counts(self):
        records = run_spectrum_sweep(SweepConfig())
        assert len(records) == 29
        for r in records:
            assert r.exact_energies[0] <= r.exact_energies[1] <= r.exact_energies[2]
            assert r.term_count == 20
            assert r.vqe_energies is None

    def test_workers_do_not_change_results(self):
        config = SweepConfig(e_l_stop=1.0)
        serial = run_spectrum_sweep(config, workers=1)
        parallel = run_spectrum_sweep(config, workers=2)
        assert [r.to_json_dict() for r in serial] == [r.to_json_dict() for r in parallel]


class TestSsvqeSweep:
    def test_records_complete_and_deterministic(self):
        config = tiny_ssvqe_config()
        records1, errors1, _ = run_ssvqe_sweep(config)
        records2, errors2, _ = run_ssvqe_sweep(config)
        assert errors1 == errors2 == []
        assert [r.to_json_dict() for r in records1] == [r.to_json_dict() for r in records2]
        for r in records1:
            assert r.vqe_energies is not None
            assert r.iterations_used == 40
            assert r.vqe_energies[0] >= r.exact_energies[0] - 1e-9

    def test_workers_do_not_change_results(self):
        config = tiny_ssvqe_config()
        serial, _, _ = run_ssvqe_sweep(config, workers=1)
        parallel, _, _ = run_ssvqe_sweep(config, workers=2)
        assert [r.to_json_dict() for r in serial] == [r.to_json_dict() for r in parallel]

    def test_optimizer_seed_changes_outcome(self):
        base, _, _ = run_ssvqe_sweep(tiny_ssvqe_config())
        other, _, _ = run_ssvqe_sweep(tiny_ssvqe_config(spsa=SpsaConfig(iterations=40, seed=1)))
        assert [r.seed for r in base] != [r.seed for r in other]

    def test_noisy_with_mitigation_fills_all_columns(self):
        config = tiny_ssvqe_config(
            noise=NoiseModel(depolarizing_prob_1q=0.001, depolarizing_prob_2q=0.01),
            mitigate=True,
        )
        records, errors, _ = run_ssvqe_sweep(config)
        assert errors == []
        for r in records:
            assert r.purities is not None
            assert r.mitigated_energies is not None
            assert all(1 / 8 <= p <= 1 for p in r.purities)

    def test_histories_returned_on_request(self):
        config = tiny_ssvqe_config(e_l_stop=0.8)
        _, _, histories = run_ssvqe_sweep(config, keep_histories=True)
        assert set(histories) == {0.8}
        assert histories[0.8].cost_history.shape == (40,)

    def test_wrong_cutoff_reported_per_point(self):
        config = tiny_ssvqe_config(cutoff=9)
        records, errors, _ = run_ssvqe_sweep(config)
        assert records == []
        assert len(errors) == 3
        assert "3-qubit" in errors[0][1]


class TestRecordSerialization:
    def test_json_round_trip(self):
        records, _, _ = run_ssvqe_sweep(tiny_ssvqe_config())
        for r in records:
            again = SweepRecord.from_json_dict(json.loads(json.dumps(r.to_json_dict())))
            assert again == r

    def test_csv_round_trip(self, tmp_path):
        records, _, _ = run_ssvqe_sweep(tiny_ssvqe_config())
        path = tmp_path / "rows.csv"
        write_sweep_csv(path, records)
        assert read_sweep_csv(path) == records

    def test_validation_on_load(self):
        bad = {
            "e_l": 1.0,
            "exact_energies": [2.0, 1.0, 3.0],  # not ascending
            "term_count": 20,
            "iterations_used": 0,
            "seed": 0,
        }
        with pytest.raises(ValueError):
            SweepRecord.from_json_dict(bad)

    def test_noiseless_bound_checked_on_load(self):
        bad = {
            "e_l": 1.0,
            "exact_energies": [-1.0, 0.0, 1.0],
            "vqe_energies": [-2.0, 0.0, 1.0],  # below the variational bound
            "term_count": 20,
            "iterations_used": 10,
            "seed": 0,
        }
        with pytest.raises(ValueError):
            SweepRecord.from_json_dict(bad)


class TestAnticrossing:
    def synthetic(self, gaps, e_ls=None):
        e_ls = e_ls if e_ls is not None else np.arange(len(gaps), dtype=float) + 1.0
        return [
            SweepRecord(e_l=float(el), exact_energies=(0.0, 0.0, float(g)))
            for el, g in zip(e_ls, gaps)
        ]

    def test_paper_window(self):
        records = run_spectrum_sweep(SweepConfig(e_l_step=0.05))
        result = find_anticrossing(records)
        assert result.interior
        assert 0.35 <= result.e_l <= 0.55
        print(f"minimum excited-state gap {result.gap:.4f} GHz at E_L = {result.e_l:.4f} GHz")

    def test_monotone_gap_flags_boundary(self):
        result = find_anticrossing(self.synthetic([1.0, 2.0, 3.0, 4.0]))
        assert not result.interior
        assert result.e_l == 1.0

    def test_symmetric_minimum_lands_on_grid_point(self):
        result = find_anticrossing(self.synthetic([3.0, 1.0, 3.0]))
        assert result.interior
        assert result.e_l == pytest.approx(2.0, abs=1e-9)
        assert result.gap == pytest.approx(1.0, abs=1e-9)

    def test_needs_three_records(self):
        with pytest.raises(ValueError):
            find_anticrossing(self.synthetic([1.0, 2.0]))

    def test_requires_sorted_records(self):
        records = self.synthetic([1.0, 2.0, 3.0], e_ls=[3.0, 2.0, 1.0])
        with pytest.raises(ValueError):
            find_anticrossing(records)


class TestCli:
    def test_spectrum_then_reload(self, tmp_path, capsys):
        out = tmp_path / "run"
        code = main([
            "spectrum", "--e-l-stop", "0.6", "--out", str(out), "--format", "both",
        ])
        assert code == 0
        csv_records = read_sweep_csv(out / "spectrum.csv")
        doc = read_json_doc(out / "spectrum.json")
        json_records = [SweepRecord.from_json_dict(r) for r in doc["records"]]
        assert csv_records == json_records
        assert doc["config"]["e_j"] == 4.5

    def test_determinism_byte_identical(self, tmp_path):
        args = ["ssvqe", "--e-l-start", "1.0", "--e-l-stop", "1.1", "--e-l-step", "0.1",
                "--iterations", "30", "--restarts", "2", "--seed", "5"]
        out1, out2 = tmp_path / "one", tmp_path / "two"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        for name in ("ssvqe.csv", "ssvqe.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_config_file_precedence(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"e_l_step": 0.4, "e_j": 9.0}))
        out = tmp_path / "out"
        code = main([
            "spectrum", "--config", str(cfg), "--e-j", "5.5", "--out", str(out),
            "--format", "json",
        ])
        assert code == 0
        doc = read_json_doc(out / "spectrum.json")
        assert doc["config"]["e_j"] == 5.5
        assert doc["config"]["e_l_step"] == 0.4

    def test_toml_config(self, tmp_path):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text('e_l_start = 1.0\ne_l_stop = 1.2\n')
        out = tmp_path / "out"
        assert main(["spectrum", "--config", str(cfg), "--out", str(out), "--format", "json"]) == 0
        doc = read_json_doc(out / "spectrum.json")
        assert [r["e_l"] for r in doc["records"]] == [1.0, 1.1, 1.2]

    def test_invalid_config_exit_code(self, tmp_path):
        assert main(["spectrum", "--e-l-step", "-0.1", "--out", str(tmp_path)]) == 1
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"nonsense_key": 1}))
        assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 1
        assert main(["decompose", "--cutoff", "5", "--out", str(tmp_path)]) == 1

    def test_decompose_diagonal_point(self, tmp_path):
        out = tmp_path / "d"
        assert main(["decompose", "--e-j", "0", "--e-l", "1.0", "--out", str(out)]) == 0
        doc = read_json_doc(out / "decompose.json")
        assert doc["reconstruction_residual"] <= 1e-10
        assert all(set(t["label"]) <= {"I", "Z"} for t in doc["terms"])

    def test_decompose_term_count_logged(self, tmp_path, capsys):
        out = tmp_path / "d"
        assert main(["decompose", "--e-l", "0.5", "--out", str(out)]) == 0
        doc = read_json_doc(out / "decompose.json")
        assert doc["term_count"] == len(doc["terms"])
        assert "Pauli terms" in capsys.readouterr().out

    def test_metrics_even_in_flux(self, tmp_path):
        out = tmp_path / "m"
        assert main([
            "metrics", "--e-l", "2.2", "--phi-start", "-0.4", "--phi-stop", "0.4",
            "--phi-step", "0.2", "--cutoff", "25", "--out", str(out), "--format", "json",
        ]) == 0
        rows = read_json_doc(out / "metrics.json")["rows"]
        f01 = {round(r["phi_ext"], 9): r["f01"] for r in rows}
        for phi in (0.2, 0.4):
            assert f01[phi] == pytest.approx(f01[-phi], abs=1e-9)
        zero_row = [r for r in rows if abs(r["phi_ext"]) < 1e-12][0]
        assert zero_row["flux_sensitivity"] <= 1e-6

    def test_valleys_both_regimes(self, tmp_path):
        out_a = tmp_path / "va"
        assert main(["valleys", "--e-l", "0.2", "--out", str(out_a), "--format", "json"]) == 0
        doc_a = read_json_doc(out_a / "valleys.json")
        assert doc_a["valley_count"] >= 2
        out_b = tmp_path / "vb"
        assert main(["valleys", "--e-l", "2.0", "--out", str(out_b), "--format", "json"]) == 0
        doc_b = read_json_doc(out_b / "valleys.json")
        assert doc_b["dominant_single_valley"] is True
        assert len(doc_b["curve"]["phi"]) == len(doc_b["curve"]["potential"])

    def test_anticross_command(self, tmp_path):
        out = tmp_path / "x"
        assert main([
            "anticross", "--e-l-start", "0.3", "--e-l-stop", "0.8", "--out", str(out),
            "--format", "json",
        ]) == 0
        doc = read_json_doc(out / "anticross.json")
        assert 0.35 <= doc["e_l_star"] <= 0.55
        assert doc["interior"] is True

    def test_histories_flag_writes_files(self, tmp_path):
        out = tmp_path / "h"
        assert main([
            "ssvqe", "--e-l-start", "1.0", "--e-l-stop", "1.0", "--iterations", "20",
            "--restarts", "1", "--out", str(out), "--histories", "--format", "json",
        ]) == 0
        history = read_json_doc(out / "ssvqe_history_el_1.0.json")
        assert len(history["cost_history"]) == 20
