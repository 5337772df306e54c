# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""Unit tests for the error bounds and the threshold choice."""

from math import e, exp, log, sqrt

import numpy as np
import pytest
from pydantic import ValidationError

from smuce.exceptions import DomainError
from smuce.expfam import Bernoulli, GaussMean, Poisson
from smuce.services.nulldist import NullTable
from smuce.services.tuning import (
    SignalPrior,
    alpha_of_q,
    beta_bound,
    choose_q,
    constant_c,
    error_curve,
    gaussian_underestimation_bound,
    location_error_bound,
    solve_lambda_star,
    underestimation_bound,
)


def table_of(samples: list[float], n: int = 100) -> NullTable:
    return NullTable(n=n, reps=len(samples), seed=0, min_scale=1 / n, samples=sorted(samples))


def direct_beta(q: float, eta: float, lam: float) -> float:
    gap = max(eta / (2 * sqrt(2)) - q - sqrt(2 * log(2 * e / lam)), 0.0)
    return min(1.0, 2 / lam * (exp(-(gap**2) / 8) + exp(-(eta**2) / 16)))


class TestSignalPrior:
    def test_feature_size(self) -> None:
        """Test η = √(nλ) Δ and K ≤ 1/λ."""
        prior = SignalPrior(lambda_min=0.25, delta_min=2.0)
        assert prior.eta(100) == pytest.approx(10.0)
        assert prior.max_jumps() == 4

    def test_invalid_box(self) -> None:
        """Test the box must be a proper interval."""
        with pytest.raises(ValidationError, match="theta_box"):
            SignalPrior(lambda_min=0.1, delta_min=1.0, theta_box=(1.0, 0.0))


class TestBounds:
    def test_beta_bound_matches_formula(self) -> None:
        """Test β on a grid against a direct evaluation."""
        grid = np.linspace(-1.0, 6.0, 1000)
        eta, lam = 40.0, 0.2
        values = beta_bound(grid, eta, lam)
        expected = [direct_beta(q, eta, lam) for q in grid]
        np.testing.assert_allclose(values, expected, rtol=1e-10, atol=1e-300)

    def test_beta_bound_is_capped(self) -> None:
        """Test the bound never exceeds one."""
        assert beta_bound(100.0, 5.0, 0.5) == 1.0
        assert np.all(np.asarray(beta_bound(np.linspace(0, 50, 20), 1.0, 0.1)) <= 1.0)

    def test_beta_bound_domain(self) -> None:
        """Test λ in (0, ½] and η > 0 are required."""
        with pytest.raises(DomainError):
            beta_bound(1.0, 10.0, 0.6)
        with pytest.raises(DomainError):
            beta_bound(1.0, 0.0, 0.1)

    def test_gaussian_bound_with_default_count(self) -> None:
        """Test 2K with K = 1/λ reproduces β(q, η, λ)."""
        prior = SignalPrior(lambda_min=0.25, delta_min=1.5)
        q = np.linspace(0, 3, 7)
        np.testing.assert_allclose(
            gaussian_underestimation_bound(q, 400, prior),
            beta_bound(q, prior.eta(400), 0.25),
        )
        with pytest.raises(DomainError):
            gaussian_underestimation_bound(q, 400, prior, k=0)

    def test_general_bound_decreases_in_n(self) -> None:
        """Test more data tightens the family bound."""
        prior = SignalPrior(lambda_min=0.1, delta_min=1.0, theta_box=(0.0, log(4.0)))
        values = [underestimation_bound(1.0, n, prior, 3, Poisson()) for n in (10**3, 10**4, 10**5)]
        assert values[0] >= values[1] >= values[2]
        assert values[2] < 1.0

    def test_location_bound(self) -> None:
        """Test the location bound shrinks with the allowed error."""
        prior = SignalPrior(lambda_min=0.1, delta_min=1.0)
        loose = location_error_bound(1.0, 10**5, 0.05, prior, 2, GaussMean())
        tight = location_error_bound(1.0, 10**5, 0.01, prior, 2, GaussMean())
        assert loose <= tight <= 1.0
        with pytest.raises(DomainError):
            location_error_bound(1.0, 100, 0.0, prior, 2, GaussMean())

    def test_constant_c(self) -> None:
        """Test C for Gaussian means and a Poisson box."""
        assert constant_c(GaussMean()) == 1 / 32
        # v(θ) = e^θ ranges over [1, 4]
        assert constant_c(Poisson(), (0.0, log(4.0))) == pytest.approx(1 / 128)
        with pytest.raises(DomainError, match="theta box"):
            constant_c(Bernoulli())


class TestThresholdChoice:
    def test_lambda_star(self) -> None:
        """Test the worst case prior solves √n λ = 12 √(-log λ)."""
        lam, eta = solve_lambda_star(500)
        assert lam == pytest.approx(0.468, abs=2e-3)
        assert sqrt(500) * lam == pytest.approx(12 * sqrt(-log(lam)), abs=1e-9)
        assert eta == pytest.approx(12 * sqrt(-log(lam)))
        with pytest.raises(DomainError):
            solve_lambda_star(1)

    def test_error_curve_grid(self) -> None:
        """Test the grid spans the positive samples and α counts samples ≥ q."""
        table = table_of([0.0, 0.25, 1.0, 1.0])
        curve = error_curve(table, 100, step=0.25)
        assert curve.q == pytest.approx([0.25, 0.5, 0.75, 1.0])
        assert curve.alpha == [0.75, 0.5, 0.5, 0.5]
        assert alpha_of_q(table, 0.5) == 0.5
        assert len(curve.rows()) == 4
        with pytest.raises(DomainError):
            error_curve(table, 100, step=0.0)

    def test_grid_is_positive(self) -> None:
        """Test non-positive samples never enter the threshold grid."""
        curve = error_curve(table_of([-0.37, -0.1, 0.05, 0.3]), 100, step=0.1)
        assert curve.q == pytest.approx([0.03, 0.13, 0.23, 0.33])
        assert curve.alpha == [0.5, 0.25, 0.25, 0.0]
        choice = choose_q(100, table_of([-1.0, -0.5]))
        assert choice.q > 0
        assert choice.alpha == 0.0

    def test_worst_case_bound_at_n_497(self) -> None:
        """Test β(q, η*, λ*) is capped at 1 for all thresholds at n = 497."""
        lam, eta = solve_lambda_star(497)
        assert lam == pytest.approx(0.4686, abs=1e-3)
        assert eta == pytest.approx(10.447, abs=1e-2)
        grid = np.linspace(0.0, 10.0, 1001)
        np.testing.assert_array_equal(beta_bound(grid, eta, lam), 1.0)

    def test_lambda_star_decreases_in_n(self) -> None:
        """Test the worst case segment length shrinks as n grows."""
        lams = [solve_lambda_star(n)[0] for n in (100, 1000, 10_000)]
        assert lams[0] > lams[1] > lams[2]

    def test_single_sample(self) -> None:
        """Test a one sample table yields its sample with α = 1."""
        choice = choose_q(100, table_of([0.5]))
        assert choice.q == 0.5
        assert choice.alpha == 1.0
        assert choice.objective == pytest.approx(-choice.beta)

    def test_smallest_maximiser(self) -> None:
        """Test ties resolve to the smallest threshold."""
        prior = SignalPrior(lambda_min=0.25, delta_min=10.0)
        choice = choose_q(1000, table_of([1.0, 2.0]), prior)
        assert choice.q == pytest.approx(1.01)
        assert choice.alpha == 0.5

    def test_trades_both_errors(self) -> None:
        """Test the chosen threshold balances α and β."""
        rng = np.random.default_rng(3)
        table = table_of(rng.normal(size=500).tolist(), n=500)
        choice = choose_q(500, table)
        curve = error_curve(table, 500)
        assert choice.objective == pytest.approx(float(np.max(curve.objective())))
        assert curve.q[0] <= choice.q <= curve.q[-1]
