"""
Tests for the ametric-lab command line
"""

import csv
import json

import pytest

from ametric_lab import __version__
from ametric_lab.cli import main
from ametric_lab.cli.main import EXIT_FAILURE, EXIT_OK, EXIT_USAGE
from ametric_lab.cli.manifest import manifest_path, sha256_file

from .factories import (
    ExperimentDataFactory,
    MapDataFactory,
    PerturbationDataFactory,
    RunDataFactory,
    ScheduleDataFactory,
    SpaceDataFactory,
)


def _stdout(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def _csv_rows(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    return lines[0], list(csv.reader(lines[1:]))


def _check_config(**overrides):
    data = ExperimentDataFactory(run=RunDataFactory(mode="check", n_samples=2000), **overrides)
    del data["map"]
    return data


def _stability_config(**overrides):
    return ExperimentDataFactory(
        run=RunDataFactory(mode="stability", n_steps=200, n_samples=500), **overrides
    )


class TestPropertyCommands:
    """Test check-axioms, check-convex, classify-map and estimate-delta"""

    def test_check_axioms_passes(self, write_config, capsys):
        code = main(["check-axioms", "--config", str(write_config(_check_config()))])
        payload = _stdout(capsys)

        assert code == EXIT_OK
        assert payload["success"] is True
        assert payload["summary"]["samples_checked"] == 2000

    def test_check_axioms_fails_on_signed_space(self, write_config, capsys):
        config = write_config(_check_config(space=SpaceDataFactory(kind="signed")))
        code = main(["check-axioms", "--config", str(config)])
        payload = _stdout(capsys)

        assert code == EXIT_FAILURE
        assert payload["summary"]["violations"]["A1"] > 0

    def test_check_axioms_on_grid(self, write_config, capsys):
        data = ExperimentDataFactory(
            run=RunDataFactory(mode="check", n_samples=100, grid=[-1.0, 0.0, 1.0])
        )
        del data["map"]
        code = main(["check-axioms", "--config", str(write_config(data))])
        payload = _stdout(capsys)

        assert code == EXIT_OK
        assert payload["summary"]["passed"] is True
        assert payload["summary"]["samples_checked"] == 27

    def test_check_convex(self, write_config, capsys):
        assert main(["check-convex", "--config", str(write_config(_check_config()))]) == EXIT_OK

    def test_first_slot_structure_fails(self, write_config, capsys):
        config = write_config(_check_config(structure={"kind": "first_slot"}))
        assert main(["check-convex", "--config", str(config)]) == EXIT_FAILURE

    def test_classify_map(self, write_config, capsys):
        code = main(["classify-map", "--config", str(write_config(ExperimentDataFactory()))])
        payload = _stdout(capsys)

        assert code == EXIT_OK
        assert payload["summary"]["is_az"] is True

    def test_estimate_delta_identity(self, write_config, capsys):
        config = write_config(ExperimentDataFactory(map=MapDataFactory(kind="identity", params={})))
        code = main(["estimate-delta", "--config", str(config)])

        assert code == EXIT_FAILURE
        assert _stdout(capsys)["summary"]["contraction"] is False

    def test_report_written_as_json(self, write_config, tmp_path, capsys):
        out = tmp_path / "axioms.json"
        config = write_config(_check_config())
        assert main(["check-axioms", "--config", str(config), "--out", str(out)]) == EXIT_OK

        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["passed"] is True


class TestRunCommand:
    """Test Picard and Mann runs with trace output"""

    def test_mann_trace_matches_closed_form(self, write_config, tmp_path, capsys):
        out = tmp_path / "mann.csv"
        config = write_config(ExperimentDataFactory())
        code = main(["run", "--config", str(config), "--out", str(out)])

        assert code == EXIT_OK
        comment, rows = _csv_rows(out)
        assert comment == f"# ametric-lab v{__version__}"
        assert rows[0] == ["n", "x_0", "dist_to_u", "bound"]
        for row in rows[1:]:
            n, dist = int(row[0]), float(row[2])
            assert abs(dist - 2.0 * 0.75**n) < 1e-9
            assert dist <= float(row[3]) * (1 + 1e-9)

    def test_manifest(self, write_config, tmp_path, capsys):
        out = tmp_path / "mann.csv"
        config = write_config(ExperimentDataFactory(run=RunDataFactory(seed=17)))
        main(["run", "--config", str(config), "--out", str(out)])

        manifest = json.loads(manifest_path(out).read_text(encoding="utf-8"))
        assert manifest["config_sha256"] == sha256_file(config)
        assert manifest["seed"] == 17
        assert manifest["version"] == __version__
        assert manifest["success"] is True
        assert manifest["peak_rss_bytes"] > 0
        assert manifest["wall_time_s"] >= 0.0

    def test_picard_from_fixed_point(self, write_config, tmp_path, capsys):
        out = tmp_path / "picard.csv"
        data = ExperimentDataFactory(run=RunDataFactory(mode="picard", x0=[0.0]))
        code = main(["run", "--config", str(write_config(data)), "--out", str(out)])

        assert code == EXIT_OK
        _, rows = _csv_rows(out)
        assert len(rows) == 2
        assert rows[1][:3] == ["0", "0.0", "0.0"]

    def test_divergence_writes_partial_trace(self, write_config, tmp_path, capsys):
        out = tmp_path / "doubling.csv"
        data = ExperimentDataFactory(
            map=MapDataFactory(kind="doubling", params={}),
            run=RunDataFactory(mode="picard", delta=None),
        )
        code = main(["run", "--config", str(write_config(data)), "--out", str(out)])
        payload = _stdout(capsys)

        assert code == EXIT_FAILURE
        assert payload["summary"]["diverged_at"] > 1
        _, rows = _csv_rows(out)
        assert len(rows) > 2

    def test_unconverged_run(self, write_config, capsys):
        config = write_config(ExperimentDataFactory(run=RunDataFactory(n_steps=5)))
        assert main(["run", "--config", str(config)]) == EXIT_FAILURE

    def test_no_strict(self, write_config, capsys):
        config = write_config(ExperimentDataFactory(run=RunDataFactory(n_steps=5)))
        assert main(["run", "--config", str(config), "--no-strict"]) == EXIT_OK

    def test_zero_weight_warns(self, write_config, capsys):
        data = ExperimentDataFactory(
            schedule=ScheduleDataFactory(params={"alpha": 0.0}),
            run=RunDataFactory(n_steps=50, delta=None),
        )
        main(["run", "--config", str(write_config(data))])

        warnings = _stdout(capsys)["warnings"]
        assert any("not a fixed point" in w for w in warnings)

    def test_reruns_are_byte_identical(self, write_config, tmp_path, capsys):
        config = str(write_config(ExperimentDataFactory()))
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["run", "--config", config, "--out", str(first)])
        main(["run", "--config", config, "--out", str(second)])

        assert first.read_bytes() == second.read_bytes()

    def test_jsonl_format(self, write_config, tmp_path, capsys):
        out = tmp_path / "mann.jsonl"
        config = str(write_config(ExperimentDataFactory()))
        main(["run", "--config", config, "--out", str(out), "--format", "jsonl"])

        first = json.loads(out.read_text(encoding="utf-8").splitlines()[0])
        assert first == {"n": 0, "x_0": 1.0, "dist_to_u": 2.0, "bound": 2.0}


class TestStabilityCommand:
    """Test the stability command"""

    def test_decaying_perturbation(self, write_config, tmp_path, capsys):
        out = tmp_path / "stability.csv"
        data = _stability_config(
            perturbation=PerturbationDataFactory(kind="decaying_geometric", params={"r": 0.5})
        )
        code = main(["stability", "--config", str(write_config(data)), "--out", str(out)])
        payload = _stdout(capsys)

        assert code == EXIT_OK
        assert payload["summary"]["verdict"] == "consistent_stable"
        assert payload["summary"]["forward_bound"]["passed"] is True
        _, rows = _csv_rows(out)
        assert rows[0] == ["n", "y_0", "eps", "dist_to_u"]
        assert len(rows) == 202
        assert rows[-1][2] == ""

    def test_constant_perturbation(self, write_config, capsys):
        data = _stability_config(
            perturbation=PerturbationDataFactory(kind="constant", params={"m": 1.0})
        )
        main(["stability", "--config", str(write_config(data))])

        assert _stdout(capsys)["summary"]["verdict"] == "consistent_unstable_input"

    def test_harmonic_schedule_warning_in_manifest(self, write_config, tmp_path, capsys):
        out = tmp_path / "harmonic.csv"
        data = _stability_config(schedule=ScheduleDataFactory(kind="harmonic", params={}))
        main(["stability", "--config", str(write_config(data)), "--out", str(out)])

        manifest = json.loads(manifest_path(out).read_text(encoding="utf-8"))
        assert any("lower bound" in w for w in manifest["warnings"])

    def test_seed_override(self, write_config, tmp_path, capsys):
        out = tmp_path / "stability.csv"
        config = str(write_config(_stability_config()))
        main(["stability", "--config", config, "--out", str(out), "--seed", "123"])

        manifest = json.loads(manifest_path(out).read_text(encoding="utf-8"))
        assert manifest["seed"] == 123

    def test_divergence_writes_partial_report(self, write_config, tmp_path, capsys):
        out = tmp_path / "doubling.csv"
        data = ExperimentDataFactory(
            map=MapDataFactory(kind="doubling", params={}),
            schedule=ScheduleDataFactory(params={"alpha": 1.0}),
            run=RunDataFactory(mode="stability", n_steps=1000, n_samples=500, delta=None),
        )
        code = main(["stability", "--config", str(write_config(data)), "--out", str(out)])
        payload = _stdout(capsys)

        assert code == EXIT_FAILURE
        assert payload["success"] is False
        assert payload["summary"]["diverged_at"] == 333
        assert any("diverged" in note for note in payload["summary"]["notes"])
        _, rows = _csv_rows(out)
        assert rows[0] == ["n", "y_0", "eps", "dist_to_u"]
        assert len(rows) == 334
        assert rows[-1][2] == ""
        manifest = json.loads(manifest_path(out).read_text(encoding="utf-8"))
        assert manifest["success"] is False


class TestUsageErrors:
    """Test exit code 2 paths"""

    def test_missing_config(self, tmp_path, capsys):
        code = main(["check-axioms", "--config", str(tmp_path / "absent.json")])

        assert code == EXIT_USAGE
        assert _stdout(capsys)["error_code"] == "FileNotFoundError"

    def test_invalid_config(self, write_config, capsys):
        code = main(["run", "--config", str(write_config({"space": {"t": 3}}))])

        assert code == EXIT_USAGE
        assert _stdout(capsys)["error_code"] == "ConfigError"

    def test_run_with_stability_mode(self, write_config, capsys):
        assert main(["run", "--config", str(write_config(_stability_config()))]) == EXIT_USAGE

    def test_stability_with_mann_mode(self, write_config, capsys):
        config = str(write_config(ExperimentDataFactory()))
        assert main(["stability", "--config", config]) == EXIT_USAGE

    def test_missing_map_parameter(self, write_config, capsys):
        data = ExperimentDataFactory(map=MapDataFactory(params={}))
        code = main(["run", "--config", str(write_config(data))])

        assert code == EXIT_USAGE
        assert _stdout(capsys)["error_code"] == "InvalidParameterError"

    def test_negative_seed_override(self, write_config, capsys):
        config = str(write_config(ExperimentDataFactory()))
        assert main(["run", "--config", config, "--seed", "-1"]) == EXIT_USAGE

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as info:
            main(["plot", "--config", "experiment.json"])
        assert info.value.code == 2
