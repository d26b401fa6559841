"""
Tests for exceptions and the Result type
"""

import pytest

from ametric_lab.exceptions import (
    AMetricLabError,
    ConfigError,
    DivergenceError,
    ErrorSeverity,
    InvalidModulusError,
    InvalidParameterError,
    Result,
)


class TestExceptions:
    def test_hierarchy(self):
        for error in (ConfigError("run"), InvalidModulusError(1.0), DivergenceError(3, 1e101)):
            assert isinstance(error, AMetricLabError)
            assert error.severity is ErrorSeverity.ERROR

    def test_messages(self):
        assert "run.seed" in ConfigError("run.seed", "missing").message
        assert "[0, 1)" in InvalidModulusError(1.5).message
        assert "(need > 0)" in InvalidParameterError("r", -1, "need > 0").message

    def test_divergence_carries_trace(self):
        error = DivergenceError(12, 1e120, trace=("partial",))

        assert error.step == 12
        assert error.trace == ("partial",)


class TestResult:
    """Test Result helpers"""

    def test_ok(self):
        result = Result.ok(3)

        assert result.is_success()
        assert result.unwrap() == 3

    def test_from_exception(self):
        result = Result.from_exception(ConfigError("space", "bad"))

        assert result.is_failure()
        assert result.error_code == "ConfigError"
        with pytest.raises(ValueError):
            result.unwrap()

    def test_map_chains_and_catches(self):
        assert Result.ok(2).map(lambda v: Result.ok(v * 2)).unwrap() == 4

        def boom(value):
            raise InvalidModulusError(value)

        failed = Result.ok(1.5).map(boom)
        assert failed.error_code == "InvalidModulusError"

    def test_map_skips_failures(self):
        failed = Result.fail("unreadable", "OSError")

        assert failed.map(lambda v: Result.ok(v)) is failed
        assert Result.ok(None).map(lambda v: Result.ok(v)).is_failure()
