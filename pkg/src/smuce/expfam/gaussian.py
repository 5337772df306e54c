# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""Gaussian families: mean with known σ and variance with known zero mean."""

from __future__ import annotations

from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray

from smuce.exceptions import DomainError
from smuce.expfam.base import ExpFamily


def ma1_local_scale(count: ArrayLike, sigma: float, beta_ma: float) -> NDArray | float:
    """
    Variance of the sum of ``count`` consecutive observations of an MA(1)
    process εᵢ + β εᵢ₋₁ with innovation variance σ²:

        σ² [count (1 + β²) + (count - 1) β]
    """
    if not -1.0 < beta_ma < 1.0:
        raise DomainError(f"MA coefficient {beta_ma!r} must lie in (-1, 1)")
    m = np.asarray(count, dtype=float)
    value = sigma**2 * (m * (1.0 + beta_ma**2) + (m - 1.0) * beta_ma)
    return float(value) if value.ndim == 0 else value


class GaussMean(ExpFamily):
    """
    N(μ, σ²) with known σ, natural parameter θ = μ/σ².

    With ``ma_beta`` set, the local statistic is standardised by the
    variance of an MA(1) sum instead of count · σ² (the family itself is
    unchanged, only :meth:`local_scale` differs).
    """

    name = "gauss-mean"

    def __init__(self: Self, sigma: float = 1.0, ma_beta: float = 0.0) -> None:
        if not sigma > 0 or not np.isfinite(sigma):
            raise DomainError(f"sigma={sigma!r} must be a positive real")
        if not -1.0 < ma_beta < 1.0:
            raise DomainError(f"ma_beta={ma_beta!r} must lie in (-1, 1)")
        self.sigma = float(sigma)
        self.ma_beta = float(ma_beta)

    def describe(self: Self) -> dict[str, float | str]:
        params: dict[str, float | str] = {"family": self.name, "sigma": self.sigma}
        if self.ma_beta:
            params["ma_beta"] = self.ma_beta
        return params

    def _psi(self: Self, theta: NDArray) -> NDArray:
        return 0.5 * self.sigma**2 * np.square(theta)

    def _mean(self: Self, theta: NDArray) -> NDArray:
        return self.sigma**2 * np.asarray(theta, dtype=float)

    def _variance(self: Self, theta: NDArray) -> NDArray:
        return np.full_like(np.asarray(theta, dtype=float), self.sigma**2)

    def _mean_inverse(self: Self, mu: NDArray) -> NDArray:
        return np.asarray(mu, dtype=float) / self.sigma**2

    def _conjugate(self: Self, x: NDArray) -> NDArray:
        return np.square(x) / (2.0 * self.sigma**2)

    def _divergence(self: Self, x: NDArray, theta: NDArray) -> NDArray:
        # Direct form, free of cancellation for large means.
        x, theta = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(theta, dtype=float))
        with np.errstate(invalid="ignore"):
            value = np.square(x - self.sigma**2 * theta) / (2.0 * self.sigma**2)
        return np.where(np.isnan(value), np.inf, value)

    def local_scale(self: Self, counts: ArrayLike) -> NDArray:
        m = np.asarray(counts, dtype=float)
        if not self.ma_beta:
            return np.ones_like(m)
        return m * self.sigma**2 / ma1_local_scale(m, self.sigma, self.ma_beta)

    def _solve_bounds(self: Self, x: NDArray, c: NDArray) -> tuple[NDArray, NDArray]:
        centre = x / self.sigma**2
        radius = np.sqrt(2.0 * c) / self.sigma
        return centre - radius, centre + radius


class GaussVariance(ExpFamily):
    """
    N(0, σ²) with unknown σ², written for the sufficient statistic Z = Y².
    Natural parameter θ = -1/(2σ²) < 0 and mean m(θ) = σ².
    """

    name = "gauss-variance"
    theta_domain = (-np.inf, 0.0)
    mean_domain = (0.0, np.inf)
    reference_theta = -0.5

    def validate_data(self: Self, data: NDArray) -> None:
        super().validate_data(data)
        if np.any(np.asarray(data) <= 0):
            raise DomainError("gauss-variance requires nonzero observations (Z = Y² > 0)")

    def _psi(self: Self, theta: NDArray) -> NDArray:
        return -0.5 * np.log(-2.0 * np.asarray(theta, dtype=float))

    def _mean(self: Self, theta: NDArray) -> NDArray:
        theta = np.asarray(theta, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(theta < 0, -0.5 / theta, np.inf)

    def _variance(self: Self, theta: NDArray) -> NDArray:
        return 0.5 / np.square(theta)

    def _mean_inverse(self: Self, mu: NDArray) -> NDArray:
        with np.errstate(divide="ignore"):
            return -0.5 / np.asarray(mu, dtype=float)

    def _conjugate(self: Self, x: NDArray) -> NDArray:
        with np.errstate(divide="ignore"):
            return -0.5 * (1.0 + np.log(np.asarray(x, dtype=float)))
