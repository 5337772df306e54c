# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""Unit tests for the simulation studies."""

import numpy as np
import pytest
from scipy.special import ndtri

from smuce.exceptions import DomainError
from smuce.models.scenario import Scenario
from smuce.services.experiments import (
    DIFFERENCE_BINS,
    ReplicateResult,
    ScenarioRegistry,
    draw,
    run_replicate,
    run_scenario,
    scenario_threshold,
    summarize,
)
from smuce.services.multiscale import PenaltyMode
from smuce.services.nulldist import NullTable, replicate_uniforms


def zero_noise_scenario(**update: object) -> Scenario:
    params = {
        "name": "zero-noise",
        "family": "gauss-mean",
        "n": 40,
        "change_points": [20],
        "values": [0.0, 5.0],
        "sigma": 1e-6,
        "q": 4.0,
        "reps": 5,
    } | update
    return Scenario(**params)


class TestDraw:
    def test_reproducible(self) -> None:
        """Test replicates are determined by seed and index."""
        scenario = zero_noise_scenario(sigma=1.0)
        np.testing.assert_array_equal(draw(scenario, 3), draw(scenario, 3))
        assert not np.array_equal(draw(scenario, 3), draw(scenario, 4))

    def test_separate_from_null_streams(self) -> None:
        """Test scenario noise does not reuse the null table draws."""
        scenario = zero_noise_scenario(sigma=1.0, values=[0.0, 0.0])
        assert not np.allclose(draw(scenario, 0), ndtri(replicate_uniforms(0, 0, 40)))

    @pytest.mark.parametrize(
        ("family", "values"),
        [("gauss-variance", [1.0, 4.0]), ("poisson", [2.0, 9.0]), ("bernoulli", [0.1, 0.9])],
    )
    def test_families(self, family: str, values: list[float]) -> None:
        """Test draws of the non Gaussian mean families follow their support."""
        y = draw(zero_noise_scenario(family=family, values=values, sigma=1.0), 0)
        assert y.shape == (40,)
        if family != "gauss-variance":
            assert np.all(y >= 0)
            assert np.all(y == np.round(y))
        if family == "bernoulli":
            assert set(np.unique(y)) <= {0.0, 1.0}

    def test_ma_noise(self) -> None:
        """Test MA(1) noise keeps the sample size."""
        y = draw(zero_noise_scenario(sigma=1.0, noise_ma_beta=0.3), 0)
        assert y.shape == (40,)


class TestReplicates:
    def test_zero_noise_recovery(self) -> None:
        """Test a nearly noiseless signal is recovered in every replicate."""
        report = run_scenario(zero_noise_scenario(), threads=1)
        assert report.k_hat == {1: 1.0}
        assert report.k_difference["0"] == 1.0
        assert report.coverage.correct_k == 1.0
        assert report.mise < 1e-9
        assert report.detection_rate == 1.0
        assert report.at_least_k == 1.0

    def test_single_replicate(self) -> None:
        """Test the result of one replicate."""
        result = run_replicate(zero_noise_scenario(), 0, 4.0)
        assert result.k_hat == 1
        assert result.absolute_error < 1e-5

    def test_threads_do_not_change_reports(self) -> None:
        """Test reports are independent of the number of workers."""
        scenario = zero_noise_scenario(sigma=1.0, values=[0.0, 1.0], q=1.0, reps=8)
        assert run_scenario(scenario, threads=1) == run_scenario(scenario, threads=4)


class TestSummary:
    def test_difference_bins(self) -> None:
        """Test K̂ - K is binned with open ends."""
        scenario = zero_noise_scenario()
        results = [ReplicateResult(k, 0.0, 0.0, covered=False) for k in (0, 1, 1, 5, 2)]
        report = summarize(scenario, 1.0, results)
        assert tuple(report.k_difference) == DIFFERENCE_BINS
        assert report.k_difference["-1"] == 0.2
        assert report.k_difference["0"] == 0.4
        assert report.k_difference["+1"] == 0.2
        assert report.k_difference[">=+3"] == 0.2
        assert report.k_hat == {0: 0.2, 1: 0.4, 2: 0.2, 5: 0.2}
        assert report.coverage.conditional == 0.0

    def test_no_correct_count(self) -> None:
        """Test the conditional coverage is undefined without K̂ = K."""
        report = summarize(zero_noise_scenario(), 1.0, [ReplicateResult(0, 0.0, 0.0, covered=False)])
        assert report.coverage.conditional is None


class TestThreshold:
    def test_level_from_table(self) -> None:
        """Test a level is turned into the null quantile of the given source."""
        calls = []

        def tables(n: int, min_scale: float | None, mode: PenaltyMode, *, ma_beta: float | None = None) -> NullTable:
            calls.append((n, min_scale, mode, ma_beta))
            return NullTable(n=n, reps=4, seed=0, min_scale=1 / n, samples=[0.0, 1.0, 2.0, 3.0])

        scenario = zero_noise_scenario(q=None, level=0.75)
        assert scenario_threshold(scenario, tables) == 2.0
        assert calls == [(40, None, PenaltyMode.SQRT, None)]

    def test_explicit_q(self) -> None:
        """Test an explicit q is used as is."""
        assert scenario_threshold(zero_noise_scenario()) == 4.0


class TestScenarioRegistry:
    def test_builtin(self) -> None:
        """Test the built-in scenarios are registered."""
        names = ScenarioRegistry.names()
        assert "table1-gauss" in names
        assert "null-gauss" in names
        table1 = ScenarioRegistry.get("table1-gauss")
        assert table1.k == 6
        assert table1.n == 497

    def test_unknown(self) -> None:
        """Test unknown names are rejected."""
        with pytest.raises(DomainError, match="Unknown scenario"):
            ScenarioRegistry.get("missing")
