import json

import pytest

from h2path.cli import main
from h2path.dispatch import LEDGER_CSV_HEADER
from h2path.econ import TABLE_HEADER
from h2path.profiles import save_profile, synth_profile
from h2path.scenarios import preset

PROFILE = "synth:0.4883,42"


def run_cli(*args):
    return main(list(args))


class TestCompare:
    def test_all_presets(self, tmp_path):
        out = tmp_path / "res"
        assert run_cli("compare", "--presets", "all", "--profile", PROFILE,
                       "--out", str(out)) == 0
        csv_lines = (out / "comparison.csv").read_text().splitlines()
        assert csv_lines[0] == ",".join(TABLE_HEADER)
        assert len(csv_lines) == 10
        data = json.loads((out / "comparison.json").read_text())
        assert [row["scenario_id"] for row in data] == [
            "I", "II", "III-a", "III-b", "IV-a", "IV-b", "V-a", "V-b-i", "V-b-ii"
        ]

    def test_byte_identical_re_runs(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        run_cli("compare", "--presets", "all", "--profile", PROFILE, "--out", str(out_a))
        run_cli("compare", "--presets", "all", "--profile", PROFILE, "--out", str(out_b))
        assert (out_a / "comparison.csv").read_bytes() == (out_b / "comparison.csv").read_bytes()
        assert (out_a / "comparison.json").read_bytes() == (out_b / "comparison.json").read_bytes()

    def test_subset_of_presets(self, tmp_path):
        out = tmp_path / "res"
        assert run_cli("compare", "--presets", "I,II", "--profile", PROFILE,
                       "--out", str(out)) == 0
        assert len((out / "comparison.csv").read_text().splitlines()) == 3

    def test_serial_jobs_match_parallel(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        run_cli("compare", "--presets", "all", "--profile", PROFILE,
                "--out", str(out_a), "--jobs", "1")
        run_cli("compare", "--presets", "all", "--profile", PROFILE,
                "--out", str(out_b), "--jobs", "4")
        assert (out_a / "comparison.csv").read_bytes() == (out_b / "comparison.csv").read_bytes()


class TestRun:
    def test_grid_only_row_is_profile_independent(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        run_cli("run", "--preset", "I", "--profile", "synth:0.5,1", "--out", str(out_a))
        run_cli("run", "--preset", "I", "--profile", "synth:0.3,99", "--out", str(out_b))
        assert (out_a / "I.csv").read_bytes() == (out_b / "I.csv").read_bytes()

    def test_report_files_written(self, tmp_path):
        out = tmp_path / "res"
        assert run_cli("run", "--preset", "II", "--profile", PROFILE, "--out", str(out)) == 0
        assert (out / "II.csv").exists()
        data = json.loads((out / "II.json").read_text())
        assert data["scenario_id"] == "II"
        assert data["cost"]["c_total_gbp"] > 0

    def test_ledger_flag(self, tmp_path):
        out = tmp_path / "res"
        run_cli("run", "--preset", "II", "--profile", PROFILE, "--out", str(out), "--ledger")
        lines = (out / "II_ledger.csv").read_text().splitlines()
        assert lines[0] == LEDGER_CSV_HEADER
        assert len(lines) == 17_521

    def test_file_profile(self, tmp_path):
        prof_file = tmp_path / "wind.csv"
        save_profile(synth_profile(0.4883, 10.0, seed=42), prof_file)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        run_cli("run", "--preset", "II", "--profile", str(prof_file), "--out", str(out_a))
        run_cli("run", "--preset", "II", "--profile", PROFILE, "--out", str(out_b))
        assert (out_a / "II.csv").read_bytes() == (out_b / "II.csv").read_bytes()

    def test_scenario_file_equivalent_to_preset(self, tmp_path):
        scen_file = tmp_path / "scenario.json"
        preset("V-b-i").to_json(scen_file)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        run_cli("run", "--scenario", str(scen_file), "--profile", PROFILE, "--out", str(out_a))
        run_cli("run", "--preset", "V-b-i", "--profile", PROFILE, "--out", str(out_b))
        assert (out_a / "V-b-i.csv").read_bytes() == (out_b / "V-b-i.csv").read_bytes()

    def test_env_var_default_out(self, tmp_path, monkeypatch):
        monkeypatch.setenv("H2PATH_OUT", str(tmp_path / "env_out"))
        assert run_cli("run", "--preset", "I", "--profile", PROFILE) == 0
        assert (tmp_path / "env_out" / "I.csv").exists()


class TestOverrides:
    def test_zero_ppa_matches_free_lcoh(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        run_cli("run", "--preset", "II", "--profile", PROFILE, "--out", str(out_a))
        run_cli("run", "--preset", "II", "--profile", PROFILE, "--out", str(out_b),
                "--set", "econ.p_ppa=0")
        base = json.loads((out_a / "II.json").read_text())
        free = json.loads((out_b / "II.json").read_text())
        assert free["cost"]["lcoh_gbp_per_mwh_hhv"] == pytest.approx(
            base["lcoh_free_gbp_per_mwh"], rel=1e-12
        )

    def test_unknown_key_is_config_error(self, tmp_path):
        code = run_cli("run", "--preset", "I", "--profile", PROFILE,
                       "--out", str(tmp_path), "--set", "econ.nonsense=1")
        assert code == 1

    def test_malformed_pair_is_config_error(self, tmp_path):
        code = run_cli("run", "--preset", "I", "--profile", PROFILE,
                       "--out", str(tmp_path), "--set", "econ.p_ppa")
        assert code == 1

    def test_invalid_combination_rejected_before_simulation(self, tmp_path):
        # off-grid pattern with grid back-up is contradictory
        code = run_cli("run", "--preset", "II", "--profile", PROFILE,
                       "--out", str(tmp_path), "--set", "rule.grid_backup=true")
        assert code == 1
        assert not (tmp_path / "II.csv").exists()

    def test_override_boolean_coercion(self, tmp_path):
        out = tmp_path / "res"
        code = run_cli("run", "--preset", "III-a", "--profile", PROFILE,
                       "--out", str(out), "--set", "rule.grid_backup=true")
        assert code == 0
        row = (out / "III-a.csv").read_text().splitlines()[1]
        assert row.split(",")[6] == "100.00"  # back-up drives full load


class TestSweepCommand:
    def test_capex_range_sweep(self, tmp_path):
        out = tmp_path / "res"
        code = run_cli("sweep", "--preset", "III-a", "--param", "pem_capex",
                       "--range", "-0.8:0.3:0.1", "--profile", PROFILE, "--out", str(out))
        assert code == 0
        lines = (out / "sweep_pem_capex.csv").read_text().splitlines()
        assert lines[0] == "parameter,value,lcoh_gbp_per_mwh,lcoh_gbp_per_kg"
        assert len(lines) == 13  # 12 points
        lcohs = [float(l.split(",")[2]) for l in lines[1:]]
        assert all(b >= a for a, b in zip(lcohs, lcohs[1:]))

    def test_default_grid_used_without_range(self, tmp_path):
        out = tmp_path / "res"
        assert run_cli("sweep", "--preset", "III-a", "--param", "p_ppa",
                       "--profile", PROFILE, "--out", str(out)) == 0
        lines = (out / "sweep_p_ppa.csv").read_text().splitlines()
        assert len(lines) == 10  # 9 default points
        assert float(lines[1].split(",")[1]) == 0.0

    def test_efficiency_values(self, tmp_path):
        out = tmp_path / "res"
        code = run_cli("sweep", "--preset", "III-a", "--param", "efficiency",
                       "--values", "0.03,0.10", "--profile", PROFILE, "--out", str(out))
        assert code == 0
        lines = (out / "sweep_efficiency.csv").read_text().splitlines()
        assert len(lines) == 3

    def test_efficiency_range_rejected(self, tmp_path):
        code = run_cli("sweep", "--preset", "III-a", "--param", "efficiency",
                       "--range", "0:0.1:0.01", "--profile", PROFILE, "--out", str(tmp_path))
        assert code == 1

    def test_out_of_range_values_rejected(self, tmp_path):
        code = run_cli("sweep", "--preset", "III-a", "--param", "stack_life",
                       "--values", "10000", "--profile", PROFILE, "--out", str(tmp_path))
        assert code == 1

    def test_stack_life_absolute_range(self, tmp_path):
        out = tmp_path / "res"
        code = run_cli("sweep", "--preset", "III-a", "--param", "stack_life",
                       "--range", "60000:120000:20000", "--profile", PROFILE, "--out", str(out))
        assert code == 0
        lines = (out / "sweep_stack_life.csv").read_text().splitlines()
        assert len(lines) == 5


class TestDumpLedger:
    def test_dump(self, tmp_path):
        out = tmp_path / "res"
        assert run_cli("dump-ledger", "--preset", "V-a", "--profile", PROFILE,
                       "--out", str(out)) == 0
        lines = (out / "V-a_ledger.csv").read_text().splitlines()
        assert lines[0] == LEDGER_CSV_HEADER
        assert len(lines) == 17_521


class TestExitCodes:
    def test_missing_profile_file(self, tmp_path):
        assert run_cli("run", "--preset", "I", "--profile", str(tmp_path / "no.csv"),
                       "--out", str(tmp_path)) == 1

    def test_bad_synth_spec(self, tmp_path):
        assert run_cli("run", "--preset", "I", "--profile", "synth:abc",
                       "--out", str(tmp_path)) == 1

    def test_unparseable_arguments(self):
        assert run_cli("run", "--nonsense") == 1

    def test_unknown_command(self):
        assert run_cli("explode") == 1

    def test_simulation_error_exit_code(self, tmp_path):
        # an absurd compressor demand makes the power split diverge
        code = run_cli("run", "--preset", "II", "--profile", PROFILE,
                       "--out", str(tmp_path),
                       "--set", "plant.compressor.energy_kwh_per_kg=50000")
        assert code == 2

    def test_undefined_lcoh_exit_code(self, tmp_path):
        code = run_cli("run", "--preset", "II", "--profile", "synth:0.0,1",
                       "--out", str(tmp_path))
        assert code == 2
