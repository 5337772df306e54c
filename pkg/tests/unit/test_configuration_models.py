# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""Unit tests for the configuration models."""

from pathlib import Path

import pytest
from pydantic import ValidationError

from smuce.models.configuration import (
    ChooseQConfigDTO,
    FitConfigDTO,
    NullConfigDTO,
    SimulateConfigDTO,
    SimulationConfigDTO,
)
from smuce.models.scenario import Scenario
from smuce.services.multiscale import PenaltyMode

INPUT = Path("series.csv")


class TestSimulationConfigDTO:
    def test_defaults(self) -> None:
        """Test the default simulation settings."""
        config = SimulationConfigDTO()
        assert config.reps == 5000
        assert config.seed == 0
        assert config.threads is None
        assert config.override_budget is False

    @pytest.mark.parametrize(
        ("field", "value", "message"),
        [
            ("reps", 0, "reps must be greater than 0"),
            ("seed", -1, "unsigned 64 bit"),
            ("seed", 2**64, "unsigned 64 bit"),
            ("threads", 0, "threads must be greater than 0"),
            ("compute_budget", 0.0, "compute_budget must be greater than 0"),
        ],
    )
    def test_invalid(self, field: str, value: float, message: str) -> None:
        """Test SimulationConfigDTO rejects invalid values."""
        with pytest.raises(ValidationError, match=message):
            SimulationConfigDTO(**{field: value})


class TestFitConfigDTO:
    def test_valid_alpha(self) -> None:
        """Test FitConfigDTO with a significance level."""
        config = FitConfigDTO(input_path=INPUT, alpha=0.1, sigma=1.0)
        assert config.family == "gauss-mean"
        assert config.mode is PenaltyMode.SQRT
        assert config.simulation.reps == 5000

    def test_mode_from_string(self) -> None:
        """Test the calibration mode is parsed from its name."""
        assert FitConfigDTO(input_path=INPUT, q=1.0, sigma=1.0, mode="loglog").mode is PenaltyMode.LOGLOG

    @pytest.mark.parametrize(
        "kwargs",
        [
            {},
            {"alpha": 0.1, "q": 1.0},
            {"alpha": 0.1, "auto_q": True},
            {"q": 1.0, "auto_q": True},
        ],
    )
    def test_exactly_one_threshold(self, kwargs: dict) -> None:
        """Test exactly one way of choosing the threshold is required."""
        with pytest.raises(ValidationError, match="exactly one of alpha, q and auto_q"):
            FitConfigDTO(input_path=INPUT, sigma=1.0, **kwargs)

    @pytest.mark.parametrize(
        ("kwargs", "message"),
        [
            ({"alpha": 1.0}, "alpha must be between 0 and 1"),
            ({"q": 1.0, "family": "cauchy"}, "family must be one of"),
            ({"q": 1.0, "min_scale": 0.0}, "min_scale must lie in"),
            ({"q": 1.0}, "sigma is required for the gauss-mean family"),
            ({"q": 1.0, "sigma": -1.0}, "sigma must be greater than 0"),
            ({"q": 1.0, "family": "poisson", "sigma": 2.0}, "sigma is only valid"),
            ({"q": 1.0, "family": "poisson", "ma_beta": 0.3}, "ma_beta is only valid"),
            ({"q": 1.0, "family": "quantile"}, "quantile_level is required"),
            ({"q": 1.0, "quantile_level": 0.5}, "quantile_level is required"),
            ({"q": 1.0, "family": "quantile", "quantile_level": 1.5}, "quantile_level must be between"),
            ({"auto_q": True, "sigma": 1.0, "lambda_min": 0.1}, "must be given together"),
            ({"q": 1.0, "sigma": 1.0, "lambda_min": 0.1, "delta_min": 1.0}, "only used with auto_q"),
        ],
    )
    def test_invalid(self, kwargs: dict, message: str) -> None:
        """Test FitConfigDTO rejects inconsistent settings."""
        with pytest.raises(ValidationError, match=message):
            FitConfigDTO(input_path=INPUT, **kwargs)

    def test_quantile(self) -> None:
        """Test the quantile family with its level."""
        config = FitConfigDTO(input_path=INPUT, auto_q=True, family="quantile", quantile_level=0.9)
        assert config.quantile_level == 0.9


class TestNullConfigDTO:
    def test_valid_exact(self) -> None:
        """Test an exact family table configuration."""
        config = NullConfigDTO(n=10, family="poisson", theta=0.0)
        assert config.family == "poisson"

    @pytest.mark.parametrize(
        ("kwargs", "message"),
        [
            ({"n": 1}, "n must be at least 2"),
            ({"n": 10, "family": "poisson"}, "must be given together"),
            ({"n": 10, "family": "quantile", "theta": 0.0}, "family must be one of"),
            ({"n": 10, "sigma": 2.0}, "sigma requires the gauss-mean family"),
            ({"n": 10, "family": "poisson", "theta": 0.0, "ma_beta": 0.2}, "only valid for Gaussian"),
        ],
    )
    def test_invalid(self, kwargs: dict, message: str) -> None:
        """Test NullConfigDTO rejects inconsistent settings."""
        with pytest.raises(ValidationError, match=message):
            NullConfigDTO(**kwargs)


class TestChooseQConfigDTO:
    def test_step_range(self) -> None:
        """Test the grid step must not exceed 0.01."""
        assert ChooseQConfigDTO(n=100, step=0.005).step == 0.005
        with pytest.raises(ValidationError, match="step must lie in"):
            ChooseQConfigDTO(n=100, step=0.1)

    def test_prior_pair(self) -> None:
        """Test the prior needs both λ and Δ."""
        with pytest.raises(ValidationError, match="must be given together"):
            ChooseQConfigDTO(n=100, delta_min=1.0)


class TestSimulateConfigDTO:
    def test_reps(self) -> None:
        """Test replicate counts must be positive."""
        assert SimulateConfigDTO(scenario="zero-noise").reps is None
        with pytest.raises(ValidationError, match="reps must be greater than 0"):
            SimulateConfigDTO(scenario="zero-noise", reps=0)


class TestScenario:
    def test_truth_and_trend(self) -> None:
        """Test the true signal and the sine trend."""
        scenario = Scenario(
            name="s",
            family="gauss-mean",
            n=6,
            change_points=[2, 5],
            values=[0.0, 1.0, -1.0],
            trend_a=0.5,
            trend_b=4.0,
            q=1.0,
        )
        assert scenario.k == 2
        assert scenario.truth().tolist() == [0.0, 0.0, 1.0, 1.0, 1.0, -1.0]
        assert scenario.trend()[0] == pytest.approx(1.0)
        assert scenario.trend()[1] == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize(
        ("kwargs", "message"),
        [
            ({"change_points": [3, 3], "values": [0.0, 1.0, 2.0], "q": 1.0}, "increasing"),
            ({"change_points": [0], "values": [0.0, 1.0], "q": 1.0}, "increasing"),
            ({"change_points": [6], "values": [0.0, 1.0], "q": 1.0}, "increasing"),
            ({"values": [0.0, 1.0], "q": 1.0}, "one value per segment"),
            ({"values": [0.0]}, "exactly one of level"),
            ({"values": [0.0], "level": 1.0}, "level must be between"),
            ({"values": [0.0], "q": 1.0, "family": "poisson", "noise_ma_beta": 0.3}, "requires the gauss-mean"),
            ({"values": [0.0], "q": 1.0, "family": "quantile"}, "family must be one of"),
        ],
    )
    def test_invalid(self, kwargs: dict, message: str) -> None:
        """Test Scenario rejects inconsistent signals and settings."""
        params = {"name": "s", "family": "gauss-mean", "n": 6} | kwargs
        with pytest.raises(ValidationError, match=message):
            Scenario(**params)
