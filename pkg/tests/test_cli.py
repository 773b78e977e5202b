"""Command-line interface: exit codes, output files, determinism."""
import json

import pytest

from nodalsim import fixtures
from nodalsim.building import serialize_building
from nodalsim.cli import main


@pytest.fixture()
def two_zone_paths(tmp_path):
    building = tmp_path / "building.json"
    building.write_text(serialize_building(fixtures.two_zone_building()), encoding="utf-8")
    weather = tmp_path / "weather.csv"
    weather.write_text(fixtures.constant_weather_csv(6, t_out=10.0), encoding="utf-8")
    return building, weather, tmp_path


class TestValidate:
    def test_valid_building(self, two_zone_paths, capsys):
        building, _, _ = two_zone_paths
        assert main(["validate", str(building)]) == 0
        assert "0 violations" in capsys.readouterr().out

    def test_broken_reference_listed(self, tmp_path, capsys):
        doc = json.loads(serialize_building(fixtures.single_zone_building()))
        doc["walls"][0]["side2"] = {"kind": "zone", "zone": "nowhere"}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        assert main(["validate", str(path)]) == 1
        assert "nowhere" in capsys.readouterr().err

    def test_violation_reported(self, tmp_path, capsys):
        doc = json.loads(serialize_building(fixtures.single_zone_building()))
        doc["walls"][0]["layers"][0]["thickness"] = -0.1
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        assert main(["validate", str(path)]) == 1
        assert "thickness" in capsys.readouterr().out

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "absent.json")]) == 2


class TestNodes:
    def test_row_count(self, two_zone_paths, capsys):
        building, _, _ = two_zone_paths
        assert main(["nodes", str(building)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 1 + 18
        assert lines[7].split(",")[2] == "z1|z2"

    def test_merge_reduces_rows(self, two_zone_paths, capsys):
        building, _, _ = two_zone_paths
        assert main(["nodes", str(building), "--merge", "z1,z2"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 1 + 16

    def test_single_wall_building(self, tmp_path, capsys):
        path = tmp_path / "one.json"
        path.write_text(serialize_building(fixtures.single_zone_building()), encoding="utf-8")
        assert main(["nodes", str(path)]) == 0
        assert len(capsys.readouterr().out.strip().splitlines()) == 1 + 4

    def test_unknown_merge_zone(self, two_zone_paths, capsys):
        building, _, _ = two_zone_paths
        assert main(["nodes", str(building), "--merge", "z1,z9"]) == 1


class TestRun:
    def test_writes_result_files(self, two_zone_paths, capsys):
        building, weather, tmp = two_zone_paths
        out = tmp / "out"
        code = main(
            ["run", str(building), str(weather), "--out", str(out), "--oracle", "--dump-nodes"]
        )
        assert code == 0
        stdout = capsys.readouterr().out
        assert "max oracle difference" in stdout
        temp_lines = (out / "temperatures.csv").read_text().strip().splitlines()
        assert temp_lines[0].startswith("t,n1_1,n2_2")
        assert "n7_8" in temp_lines[0]
        # 6 h of weather at the default dt of 600 s: initial state + 36 steps
        assert len(temp_lines) == 1 + 37
        conv_lines = (out / "convergence.csv").read_text().strip().splitlines()
        assert conv_lines[0] == "t,iterations,residual,converged"
        assert (out / "oracle_diff.csv").exists()
        assert (out / "nodes.csv").exists()

    def test_zero_horizon_single_row(self, two_zone_paths, tmp_path):
        building, _, tmp = two_zone_paths
        weather = tmp_path / "w0.csv"
        weather.write_text("t,T_ae,T_sky\n0,10,10\n", encoding="utf-8")
        out = tmp / "out0"
        assert main(["run", str(building), str(weather), "--out", str(out)]) == 0
        lines = (out / "temperatures.csv").read_text().strip().splitlines()
        assert len(lines) == 2  # header + initial state

    def test_theta_override_out_of_range(self, two_zone_paths, capsys):
        building, weather, tmp = two_zone_paths
        code = main(
            ["run", str(building), str(weather), "--theta", "0.3", "--out", str(tmp / "x")]
        )
        assert code == 1
        assert "theta" in capsys.readouterr().err

    def test_nonconvergence_exit_and_override(self, two_zone_paths, capsys):
        building, weather, tmp = two_zone_paths
        args = [
            "run", str(building), str(weather),
            "--tol", "1e-15", "--max-iter", "1", "--out", str(tmp / "nc"),
        ]
        assert main(args) == 1
        capsys.readouterr()
        assert main(args + ["--allow-nonconverged"]) == 0

    def test_deterministic_outputs(self, two_zone_paths, tmp_path):
        building, weather, _ = two_zone_paths
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        for out in (out1, out2):
            assert main(["run", str(building), str(weather), "--out", str(out), "--oracle"]) == 0
        for name in ("temperatures.csv", "convergence.csv", "oracle_diff.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_dump_matrices(self, two_zone_paths):
        building, weather, tmp = two_zone_paths
        out = tmp / "dump"
        code = main(
            ["run", str(building), str(weather), "--out", str(out), "--dump-matrices"]
        )
        assert code == 0
        assert (out / "matrices" / "z1_A_cond.csv").exists()
        assert (out / "matrices" / "z2_B_connex.csv").exists()
        rows = (out / "matrices" / "z1_A_cond.csv").read_text().strip().splitlines()
        assert len(rows) == 10 and len(rows[0].split(",")) == 10

    def test_merge_run(self, two_zone_paths):
        building, weather, tmp = two_zone_paths
        out = tmp / "merged"
        assert main(
            ["run", str(building), str(weather), "--merge", "z1,z2", "--out", str(out)]
        ) == 0
        header = (out / "temperatures.csv").read_text().splitlines()[0]
        assert len(header.split(",")) == 1 + 16

    def test_missing_weather_file(self, two_zone_paths):
        building, _, tmp = two_zone_paths
        assert main(["run", str(building), "missing.csv", "--out", str(tmp / "x")]) == 2

    def test_bad_weather_column(self, two_zone_paths, tmp_path):
        building, _, tmp = two_zone_paths
        weather = tmp_path / "bad.csv"
        weather.write_text("t,T_ae,T_sky,sw_ghost\n0,1,1,9\n", encoding="utf-8")
        assert main(["run", str(building), str(weather), "--out", str(tmp / "x")]) == 1
