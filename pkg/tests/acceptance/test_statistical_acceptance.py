# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
Statistical acceptance runs.

These tests simulate thousands of series and take minutes. Skip them with

    pytest -m "not acceptance"
"""

from math import e, exp, log, sqrt
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import ks_2samp

from smuce.expfam import GaussMean, Poisson
from smuce.infrastructure.null_cache import write_table
from smuce.services.confidence import confidence_region
from smuce.services.experiments import ScenarioRegistry, run_scenario
from smuce.services.nulldist import simulate_null
from smuce.services.quantile import QuantileModel
from smuce.services.segdp import fit_smuce
from smuce.services.tuning import (
    SignalPrior,
    beta_bound,
    choose_q,
    constant_c,
    error_curve,
    location_error_bound,
    underestimation_bound,
)
from tests.unit.oracles import zero_noise_quantile_data


@pytest.mark.acceptance
class TestOverestimation:
    @pytest.mark.timeout(600)
    def test_no_change_point(self) -> None:
        """Test K̂ > 0 occurs in at most 12% of pure noise series at α = 0.1."""
        report = run_scenario(ScenarioRegistry.get("null-gauss"))
        assert report.reps == 2000
        assert 1.0 - report.k_hat.get(0, 0.0) <= 0.12


@pytest.mark.acceptance
class TestGaussianSignal:
    @pytest.mark.timeout(1200)
    @pytest.mark.parametrize(
        ("name", "min_correct", "mise_range"),
        [
            ("table1-gauss", 0.95, (0.00012, 0.00030)),
            ("table1-gauss-s0.2", 0.94, (0.0008, 0.0017)),
        ],
    )
    def test_six_change_points(self, name: str, min_correct: float, mise_range: tuple[float, float]) -> None:
        """Test the number of jumps and the squared error of the seven level signal."""
        report = run_scenario(ScenarioRegistry.get(name))
        assert report.k_hat.get(6, 0.0) >= min_correct
        assert mise_range[0] <= report.mise <= mise_range[1]

    @pytest.mark.timeout(1200)
    def test_detection_power(self) -> None:
        """Test a bump and a two jump signal are detected."""
        bump = run_scenario(ScenarioRegistry.get("bump-detection"))
        assert bump.detection_rate >= 0.99
        two_jump = run_scenario(ScenarioRegistry.get("two-jump"))
        assert two_jump.at_least_k >= 0.99

    @pytest.mark.timeout(3600)
    def test_coverage(self) -> None:
        """Test simultaneous and conditional coverage at n = 2000 and 1 - α = 0.9."""
        report = run_scenario(ScenarioRegistry.get("coverage-quad-gauss-mean-2000-0.9"))
        assert report.coverage.simultaneous >= 0.90
        assert report.coverage.conditional is not None
        assert report.coverage.conditional >= 0.93


@pytest.mark.acceptance
class TestQuantileRegression:
    @pytest.mark.timeout(600)
    def test_zero_noise_median(self) -> None:
        """Test exact boundaries and covering level intervals on 50 noiseless series."""
        rng = np.random.default_rng(97)
        for instance in range(50):
            y, starts, levels = zero_noise_quantile_data(rng)
            model = QuantileModel(y, 0.5, 0.5)
            fit = fit_smuce(model)
            assert fit.step.boundaries == starts, f"instance {instance}"
            for (lower, upper), level in zip(fit.segment_bounds, levels, strict=True):
                assert lower <= level <= upper, f"instance {instance}"
            band_lower, band_upper = confidence_region(fit, model).band_arrays()
            truth = np.repeat(levels, np.diff([*starts, y.size]))
            assert np.all((band_lower <= truth) & (truth <= band_upper)), f"instance {instance}"


@pytest.mark.acceptance
class TestNullTables:
    @pytest.mark.timeout(900)
    def test_reproducible_and_seed_stable(self, tmp_path: Path) -> None:
        """Test equal keys give identical files and seeds give close distributions."""
        first = simulate_null(500, reps=5000, seed=0)
        again = simulate_null(500, reps=5000, seed=0, threads=1)
        other = simulate_null(500, reps=5000, seed=1)
        assert write_table(first, tmp_path / "a.txt").read_bytes() == write_table(again, tmp_path / "b.txt").read_bytes()
        assert ks_2samp(first.samples, other.samples).statistic <= 0.03


@pytest.mark.acceptance
class TestThresholdChoice:
    @pytest.mark.timeout(900)
    def test_worst_case_prior_at_n_497(self) -> None:
        """Test the automatic threshold at n = 497 only controls overestimation."""
        table = simulate_null(497, reps=5000, seed=0)
        curve = error_curve(table, 497)
        choice = choose_q(497, table)
        # (2/λ*) e^{-gap²/8} stays above 1 for every q > 0
        assert set(curve.beta) == {1.0}
        assert min(curve.q) > 0
        assert choice.objective == pytest.approx(float(np.max(curve.objective())))
        assert choice.objective <= 0.0
        assert choice.alpha == min(curve.alpha)


@pytest.mark.acceptance
class TestBoundFormulas:
    def test_against_direct_evaluation(self) -> None:
        """Test the bounds against products of exponentials on a 1000 point grid."""
        rng = np.random.default_rng(8)
        for _ in range(1000):
            q = float(rng.uniform(-1.0, 4.0))
            lam = float(rng.uniform(0.01, 0.5))
            delta = float(rng.uniform(0.2, 3.0))
            n = int(rng.integers(100, 5000))
            k = int(rng.integers(1, 10))
            c = float(rng.uniform(0.01, 0.5))
            eta = sqrt(n * lam) * delta
            prior = SignalPrior(lambda_min=lam, delta_min=delta, theta_box=(0.0, log(4.0)))

            gap = max(eta / (2 * sqrt(2)) - q - sqrt(2 * log(2 * e / lam)), 0.0)
            expected_beta = min(1.0, 2 / lam * (exp(-(gap**2) / 8) + exp(-(eta**2) / 16)))
            assert beta_bound(q, eta, lam) == pytest.approx(expected_beta, rel=1e-12, abs=1e-300)

            a = n * lam * delta**2 / 128
            s = q + sqrt(2 * log(2 * e / lam))
            expected_under = min(1.0, 2 * k * exp(-a) * (exp(s**2 / 2) + exp(-3 * a)))
            assert underestimation_bound(q, n, prior, k, Poisson()) == pytest.approx(
                expected_under,
                rel=1e-12,
                abs=1e-300,
            )

            b = 2 * n * c * delta**2 / 32
            t = q + sqrt(2 * log(e / c))
            expected_location = min(1.0, 2 * k * exp(-b) * (exp(t**2 / 2) + exp(-3 * b)))
            assert location_error_bound(q, n, c, prior, k, GaussMean()) == pytest.approx(
                expected_location,
                rel=1e-12,
                abs=1e-300,
            )

    def test_constants(self) -> None:
        """Test C for Gaussian means and Poisson intensities in [1, 4]."""
        assert constant_c(GaussMean()) == 1 / 32
        assert constant_c(Poisson(), (0.0, log(4.0))) == pytest.approx(1 / 128, rel=1e-12)
