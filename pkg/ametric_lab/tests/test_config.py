"""
Tests for experiment configuration loading and validation
"""

import pytest

from ametric_lab.config import ExperimentConfig, ScheduleConfig, load_config
from ametric_lab.exceptions import ConfigError

from .factories import ExperimentDataFactory, RunDataFactory, SpaceDataFactory


class TestExperimentConfig:
    """Test parsing of complete configuration trees"""

    def test_factory_tree_parses(self):
        data = ExperimentDataFactory()
        config = ExperimentConfig.from_dict(data)

        assert config.space.t == 3
        assert config.map.params == {"lam": 0.5}
        assert config.run.seed == data["run"]["seed"]
        assert config.run.x0 == [1.0]

    def test_defaults_for_optional_sections(self):
        config = ExperimentConfig.from_dict(
            {"space": {"t": 4}, "run": {"mode": "check", "seed": 0}}
        )

        assert config.map is None
        assert config.structure.kind == "weighted_mean"
        assert config.schedule == ScheduleConfig()
        assert config.perturbation.kind == "none"
        assert config.output.path is None

    def test_to_dict_round_trip(self):
        config = ExperimentConfig.from_dict(ExperimentDataFactory())
        assert ExperimentConfig.from_dict(config.to_dict()).to_dict() == config.to_dict()

    def test_unknown_root_key(self):
        with pytest.raises(ConfigError, match="unknown keys"):
            ExperimentConfig.from_dict(ExperimentDataFactory(plot={"kind": "png"}))

    def test_unknown_section_key(self):
        data = ExperimentDataFactory(space=SpaceDataFactory(metric="l1"))
        with pytest.raises(ConfigError) as info:
            ExperimentConfig.from_dict(data)
        assert info.value.section == "space"

    @pytest.mark.parametrize(
        "section,value",
        [
            ("space", {"kind": "hyperbolic", "t": 3}),
            ("map", {"kind": "logistic"}),
            ("structure", {"kind": "geodesic"}),
            ("schedule", {"kind": "cosine"}),
            ("perturbation", {"kind": "brownian"}),
            ("output", {"format": "parquet"}),
        ],
    )
    def test_unknown_kind(self, section, value):
        with pytest.raises(ConfigError, match="unknown kind"):
            ExperimentConfig.from_dict(ExperimentDataFactory(**{section: value}))

    def test_missing_seed(self):
        run = RunDataFactory()
        del run["seed"]
        with pytest.raises(ConfigError, match="seed"):
            ExperimentConfig.from_dict(ExperimentDataFactory(run=run))

    @pytest.mark.parametrize("seed", [-1, 1.5, "7", True])
    def test_invalid_seed(self, seed):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(ExperimentDataFactory(run=RunDataFactory(seed=seed)))

    @pytest.mark.parametrize("t", [1, 65])
    def test_arity_out_of_range(self, t):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(ExperimentDataFactory(space=SpaceDataFactory(t=t)))

    def test_x0_dimension_mismatch(self):
        data = ExperimentDataFactory(run=RunDataFactory(x0=[1.0, 2.0]))
        with pytest.raises(ConfigError, match="x0"):
            ExperimentConfig.from_dict(data)

    def test_iteration_needs_map(self):
        data = ExperimentDataFactory()
        del data["map"]
        with pytest.raises(ConfigError, match="needs a map"):
            ExperimentConfig.from_dict(data)

    def test_non_positive_tolerance(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(ExperimentDataFactory(run=RunDataFactory(tol=0.0)))


class TestOverrides:
    """Test command-line overrides"""

    def test_seed_output_and_format(self):
        config = ExperimentConfig.from_dict(ExperimentDataFactory())
        config.with_overrides(seed=42, out="trace.jsonl", fmt="jsonl")

        assert config.run.seed == 42
        assert config.output.path == "trace.jsonl"
        assert config.output.format == "jsonl"

    def test_none_keeps_values(self):
        config = ExperimentConfig.from_dict(ExperimentDataFactory(run=RunDataFactory(seed=9)))
        assert config.with_overrides().run.seed == 9

    def test_negative_seed(self):
        config = ExperimentConfig.from_dict(ExperimentDataFactory())
        with pytest.raises(ConfigError):
            config.with_overrides(seed=-3)

    def test_unknown_format(self):
        config = ExperimentConfig.from_dict(ExperimentDataFactory())
        with pytest.raises(ConfigError):
            config.with_overrides(fmt="xlsx")


class TestLoadConfig:
    """Test Result-returning file loading"""

    def test_valid_file(self, write_config):
        result = load_config(write_config(ExperimentDataFactory()))

        assert result.is_success()
        assert result.unwrap().run.mode == "mann"

    def test_missing_file(self, tmp_path):
        result = load_config(tmp_path / "absent.json")

        assert result.is_failure()
        assert result.error_code == "FileNotFoundError"

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        result = load_config(path)

        assert result.is_failure()
        assert result.error_code == "JSONDecodeError"

    def test_invalid_config(self, write_config):
        result = load_config(write_config({"space": {"t": 3}}))

        assert result.is_failure()
        assert result.error_code == "ConfigError"

    def test_bad_value_type(self, write_config):
        data = ExperimentDataFactory(run=RunDataFactory(n_steps="many"))
        result = load_config(write_config(data))

        assert result.is_failure()
        assert result.error_code == "ConfigError"

    def test_non_object_root(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")
        result = load_config(path)

        assert result.is_failure()
        assert result.error_code == "ConfigError"
        assert "<root>" in result.error
