# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
Error bounds and the automatic threshold choice.

Overestimation of the number of change-points is controlled by the null
table, α(q) = P(M ≥ q). Underestimation is bounded in terms of the
smallest segment length λ and the smallest feature size η = √(nλ) Δ by

    β(q, η, λ) = (2/λ) [exp(-⅛ (η/(2√2) - q - √(2 log(2e/λ)))₊²) + exp(-η²/16)]

and q* maximises 1 - α(q) - β(q, η*, λ*) for the worst case prior
√n λ* = 12 √(-log λ*), η* = 12 √(-log λ*).

Jump sizes Δ are in units of σ for the Gaussian mean family and in natural
parameter units for all other families. All bounds are capped at 1.
"""

from __future__ import annotations

from logging import getLogger
from math import ceil, e, floor, log, sqrt
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import bisect

from smuce.exceptions import DomainError
from smuce.expfam.base import ExpFamily
from smuce.services.nulldist import NullTable, survival

LOG = getLogger(__name__)

#: Largest grid step of the threshold scan
GRID_STEP: float = 0.01
#: Number of θ values used for the variance extrema of the constant C
THETA_GRID: int = 10_001


class SignalPrior(BaseModel):
    """Smallest segment length and jump size of the signals of interest."""

    model_config = ConfigDict(frozen=True)

    lambda_min: float = Field(..., gt=0, le=1)
    delta_min: float = Field(..., gt=0)
    theta_box: tuple[float, float] | None = None

    @model_validator(mode="after")
    def validate_box(self: Self) -> Self:
        if self.theta_box is not None and not self.theta_box[0] < self.theta_box[1]:
            raise ValueError("theta_box must satisfy lower < upper")
        return self

    def eta(self: Self, n: int) -> float:
        """Feature size √(nλ) Δ."""
        return sqrt(n * self.lambda_min) * self.delta_min

    def max_jumps(self: Self) -> int:
        """K ≤ 1/λ."""
        return max(int(1.0 / self.lambda_min), 1)


class ThresholdChoice(BaseModel):
    """Result of :func:`choose_q`."""

    q: float
    alpha: float
    beta: float
    lambda_star: float
    eta_star: float

    @property
    def objective(self: Self) -> float:
        return 1.0 - self.alpha - self.beta


class ErrorCurve(BaseModel):
    """α(q), β(q) on a grid of thresholds."""

    q: list[float]
    alpha: list[float]
    beta: list[float]
    lambda_star: float
    eta_star: float

    def objective(self: Self) -> NDArray:
        return 1.0 - np.asarray(self.alpha) - np.asarray(self.beta)

    def rows(self: Self) -> list[tuple[float, float, float, float]]:
        return [
            (q, a, b, 1.0 - a - b)
            for q, a, b in zip(self.q, self.alpha, self.beta, strict=True)
        ]


def _capped(log_value: NDArray) -> NDArray | float:
    value = np.exp(np.minimum(log_value, 0.0))
    return float(value) if np.ndim(value) == 0 else value


# ==============================================================================
# Overestimation
##
def alpha_of_q(table: NullTable, q: float) -> float:
    """Estimated α(q) = P(M ≥ q)."""
    return survival(table, q)


# ==============================================================================
# Underestimation
##
def gaussian_underestimation_bound(
    q: ArrayLike,
    n: int,
    prior: SignalPrior,
    k: int | None = None,
) -> NDArray | float:
    """
    Bound on P(K̂ < K) for Gaussian observations,

        2K [exp(-⅛ (Δ√(λn)/(2√2) - q - √(2 log(2e/λ)))₊²) + exp(-λnΔ²/16)].

    ``k`` defaults to 1/λ.
    """
    k = prior.max_jumps() if k is None else k
    if k < 1:
        raise DomainError(f"K={k} must be at least 1")
    lam = prior.lambda_min
    eta = prior.eta(n)
    gap = np.maximum(eta / (2.0 * sqrt(2.0)) - np.asarray(q, dtype=float) - sqrt(2.0 * log(2.0 * e / lam)), 0.0)
    log_value = log(2.0 * k) + np.logaddexp(-0.125 * gap**2, -(eta**2) / 16.0)
    return _capped(log_value)


def beta_bound(q: ArrayLike, eta: float, lam: float) -> NDArray | float:
    """β(q, η, λ), the Gaussian bound with K = 1/λ."""
    if not 0.0 < lam <= 0.5:
        raise DomainError(f"lambda={lam!r} must lie in (0, 1/2]")
    if eta <= 0:
        raise DomainError(f"eta={eta!r} must be positive")
    gap = np.maximum(eta / (2.0 * sqrt(2.0)) - np.asarray(q, dtype=float) - sqrt(2.0 * log(2.0 * e / lam)), 0.0)
    log_value = log(2.0 / lam) + np.logaddexp(-0.125 * gap**2, -(eta**2) / 16.0)
    return _capped(log_value)


def constant_c(family: ExpFamily, theta_box: tuple[float, float] | None = None) -> float:
    """
    C = (1/32) inf v(θ)² / sup v(θ) over the box of natural parameters,
    and 1/32 for the Gaussian mean family (jumps in units of σ).
    """
    if family.name == "gauss-mean":
        return 1.0 / 32.0
    if theta_box is None:
        raise DomainError(f"a theta box is required for the {family.name} family")
    low, high = theta_box
    family.check_theta([low, high])
    variances = np.asarray(family.variance(np.linspace(low, high, THETA_GRID)), dtype=float)
    return float(np.min(variances) ** 2 / np.max(variances)) / 32.0


def underestimation_bound(
    q: ArrayLike,
    n: int,
    prior: SignalPrior,
    k: int,
    family: ExpFamily,
) -> NDArray | float:
    """
    Bound on P(K̂ < K) for a general family,

        2K e^{-CnλΔ²} [e^{½(q + √(2 log(2e/λ)))²} + e^{-3CnλΔ²}].
    """
    if k < 1:
        raise DomainError(f"K={k} must be at least 1")
    lam = prior.lambda_min
    a = constant_c(family, prior.theta_box) * n * lam * prior.delta_min**2
    scale = np.asarray(q, dtype=float) + sqrt(2.0 * log(2.0 * e / lam))
    log_value = log(2.0 * k) - a + np.logaddexp(0.5 * scale**2, -3.0 * a)
    return _capped(log_value)


def location_error_bound(  # noqa: PLR0913
    q: ArrayLike,
    n: int,
    c: float,
    prior: SignalPrior,
    k: int,
    family: ExpFamily,
) -> NDArray | float:
    """
    Bound on the probability that some fit of the confidence set misses a
    true change-point by more than c (as a fraction of n),

        2K e^{-2CncΔ²} [e^{½(q + √(2 log(e/c)))²} + e^{-6CncΔ²}].
    """
    if not 0.0 < c <= 1.0:
        raise DomainError(f"c={c!r} must lie in (0, 1]")
    if k < 1:
        raise DomainError(f"K={k} must be at least 1")
    a = 2.0 * constant_c(family, prior.theta_box) * n * c * prior.delta_min**2
    scale = np.asarray(q, dtype=float) + sqrt(2.0 * log(e / c))
    log_value = log(2.0 * k) - a + np.logaddexp(0.5 * scale**2, -3.0 * a)
    return _capped(log_value)


# ==============================================================================
# Threshold choice
##
def solve_lambda_star(n: int) -> tuple[float, float]:
    """
    Root λ* of √n λ = 12 √(-log λ) in (0, 1) and η* = 12 √(-log λ*).
    """
    if n < 2:
        raise DomainError(f"n={n} must be at least 2")
    root_n = sqrt(n)

    def residual(lam: float) -> float:
        return root_n * lam - 12.0 * sqrt(-log(lam))

    lam = float(bisect(residual, 1e-300, 1.0, xtol=1e-15, maxiter=500))
    return lam, 12.0 * sqrt(-log(lam))


def error_curve(
    table: NullTable,
    n: int,
    prior: SignalPrior | None = None,
    step: float = GRID_STEP,
) -> ErrorCurve:
    """
    α and β on the grid min(samples) + k · step, from its first positive
    point up to the first point ≥ max(samples). A table without positive
    samples yields the single point where α vanishes.
    """
    if step <= 0:
        raise DomainError(f"step={step!r} must be positive")
    if prior is None:
        lam, eta = solve_lambda_star(n)
    else:
        lam, eta = prior.lambda_min, prior.eta(n)
    samples = table.as_array()
    low, high = float(samples[0]), float(samples[-1])
    first = 0 if low > 0 else floor(round(-low / step, 9)) + 1
    last = max(ceil(round((high - low) / step, 9)), first)
    grid = low + step * np.arange(first, last + 1)
    alpha = (table.reps - np.searchsorted(samples, grid, side="left")) / table.reps
    beta = np.asarray(beta_bound(grid, eta, min(lam, 0.5)), dtype=float).reshape(grid.shape)
    return ErrorCurve(
        q=grid.tolist(),
        alpha=alpha.tolist(),
        beta=beta.tolist(),
        lambda_star=lam,
        eta_star=eta,
    )


def choose_q(
    n: int,
    table: NullTable,
    prior: SignalPrior | None = None,
    step: float = GRID_STEP,
) -> ThresholdChoice:
    """
    q* = argmax 1 - α(q) - β(q, η*, λ*) over the threshold grid; the
    smallest maximiser wins.
    """
    curve = error_curve(table, n, prior, step)
    best = int(np.argmax(curve.objective()))
    choice = ThresholdChoice(
        q=curve.q[best],
        alpha=curve.alpha[best],
        beta=curve.beta[best],
        lambda_star=curve.lambda_star,
        eta_star=curve.eta_star,
    )
    LOG.info(
        "Chose q=%.4f (alpha=%.4f, beta=%.4g, lambda*=%.4f, eta*=%.4f)",
        choice.q,
        choice.alpha,
        choice.beta,
        choice.lambda_star,
        choice.eta_star,
    )
    return choice
