# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
This module contains the base class of all one-parameter exponential
families supported by smuce.

A family is described by its cumulant transform ψ on the open natural
parameter space Θ = (θ₁, θ₂). Everything else, the mean map m = ψ', the
variance v = ψ'', the Legendre-Fenchel conjugate φ and the divergence
J(x, θ) = φ(x) - (θx - ψ(θ)), is derived from it. Subclasses only need to
implement the closed forms; the sublevel-set solver for the multiscale
constraint lives here.

All array methods accept scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from logging import getLogger
from math import ceil, isfinite, log2
from typing import ClassVar, Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from smuce.exceptions import DomainError, MeanBoundaryError, NegativeThresholdError

LOG = getLogger(__name__)

#: Absolute tolerance of the bisection in θ.
THETA_TOLERANCE: float = 1e-10
#: Maximal number of bracket expansions and bisection steps.
MAX_ITERATIONS: int = 200


class ValueInterval(BaseModel):
    """
    Closed interval of admissible segment values in θ-space.

    Infinite end points are allowed for the one-sided case where the
    sample mean sits on the boundary of the mean domain. An interval with
    ``lower > upper`` is empty.
    """

    model_config = ConfigDict(frozen=True)

    lower: float
    upper: float

    @classmethod
    def empty_interval(cls: type[Self]) -> Self:
        return cls(lower=np.inf, upper=-np.inf)

    @property
    def empty(self: Self) -> bool:
        return self.lower > self.upper

    def __contains__(self: Self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def clamp(self: Self, value: float) -> float:
        """Project a value onto the (non-empty) interval."""
        return min(max(value, self.lower), self.upper)


class LocalStatInput(BaseModel):
    """Mean of the sufficient statistic over an interval of given length."""

    sample_mean: float
    count: int = Field(..., ge=1, description="Interval length j - i + 1")
    theta0: float

    @model_validator(mode="after")
    def validate_finite_mean(self: Self) -> Self:
        if not isfinite(self.sample_mean):
            raise ValueError("sample_mean must be finite")
        return self


class ExpFamily(ABC):
    """
    Regular one-parameter exponential family with densities
    exp(θx - ψ(θ)) with respect to some base measure.

    Subclasses set :attr:`name`, :attr:`theta_domain`, :attr:`mean_domain`
    and implement the closed forms prefixed with an underscore. The closed
    forms may assume valid input, the public wrappers check domains.
    """

    name: ClassVar[str]
    #: Open natural parameter space (θ₁, θ₂).
    theta_domain: tuple[float, float] = (-np.inf, np.inf)
    #: End points of the closure of the mean domain.
    mean_domain: tuple[float, float] = (-np.inf, np.inf)
    #: Some interior point of Θ used to start bracket searches.
    reference_theta: float = 0.0

    # ==========================================================================
    # Closed forms
    ##
    @abstractmethod
    def _psi(self: Self, theta: NDArray) -> NDArray:
        """Cumulant transform ψ(θ)."""

    @abstractmethod
    def _mean(self: Self, theta: NDArray) -> NDArray:
        """Mean map m(θ) = ψ'(θ), extended to ±∞ by its limits."""

    @abstractmethod
    def _variance(self: Self, theta: NDArray) -> NDArray:
        """Variance map v(θ) = ψ''(θ)."""

    @abstractmethod
    def _mean_inverse(self: Self, mu: NDArray) -> NDArray:
        """m⁻¹(μ), mapping boundary means to the infinite end of Θ."""

    @abstractmethod
    def _conjugate(self: Self, x: NDArray) -> NDArray:
        """Legendre-Fenchel conjugate φ(x) including its boundary limits."""

    def describe(self: Self) -> dict[str, float | str]:
        """Parameters identifying the family, used in documents and logs."""
        return {"family": self.name}

    def __repr__(self: Self) -> str:
        params = ", ".join(f"{k}={v!r}" for k, v in self.describe().items() if k != "family")
        return f"{type(self).__name__}({params})"

    # ==========================================================================
    # Domain handling
    ##
    def check_theta(self: Self, theta: ArrayLike, *, allow_boundary: bool = False) -> NDArray:
        """
        Return θ as array or raise :class:`DomainError` outside Θ. With
        ``allow_boundary`` the end points of Θ are accepted as well.
        """
        arr = np.asarray(theta, dtype=float)
        low, high = self.theta_domain
        inside = (arr > low) & (arr < high)
        if allow_boundary:
            inside |= (arr == low) | (arr == high)
        if not np.all(inside):
            raise DomainError(
                f"theta={theta!r} outside the natural parameter space ({low}, {high}) of {self.name}",
            )
        return arr

    def check_mean(self: Self, mu: ArrayLike) -> NDArray:
        """Return μ as array or raise :class:`DomainError` outside the closed mean domain."""
        arr = np.asarray(mu, dtype=float)
        low, high = self.mean_domain
        if not np.all(np.isfinite(arr)) or np.any(arr < low) or np.any(arr > high):
            raise DomainError(f"mean={mu!r} outside the mean domain [{low}, {high}] of {self.name}")
        return arr

    def at_boundary(self: Self, mu: ArrayLike) -> NDArray:
        low, high = self.mean_domain
        arr = np.asarray(mu, dtype=float)
        return (arr == low) | (arr == high)

    def validate_data(self: Self, data: NDArray) -> None:
        """Raise :class:`DomainError` if some observation is impossible under the family."""
        self.check_mean(data)

    # ==========================================================================
    # Public maps
    ##
    def cumulant(self: Self, theta: ArrayLike) -> NDArray | float:
        return _out(self._psi(self.check_theta(theta)))

    def mean(self: Self, theta: ArrayLike, *, allow_boundary: bool = False) -> NDArray | float:
        """m(θ); with ``allow_boundary`` the end points of Θ map to the ends of the mean domain."""
        return _out(self._mean(self.check_theta(theta, allow_boundary=allow_boundary)))

    def variance(self: Self, theta: ArrayLike) -> NDArray | float:
        return _out(self._variance(self.check_theta(theta)))

    def mean_inverse(self: Self, mu: ArrayLike, *, allow_boundary: bool = False) -> NDArray | float:
        """
        m⁻¹(μ) on the open mean domain.

        :raises MeanBoundaryError: for boundary means unless ``allow_boundary``
            is set, in which case the matching infinite end of Θ is returned.
        """
        arr = self.check_mean(mu)
        if not allow_boundary and np.any(self.at_boundary(arr)):
            raise MeanBoundaryError(f"mean={mu!r} is on the boundary of the mean domain of {self.name}")
        return _out(self._mean_inverse(arr))

    def conjugate(self: Self, x: ArrayLike) -> NDArray | float:
        return _out(self._conjugate(self.check_mean(x)))

    def divergence(self: Self, x: ArrayLike, theta: ArrayLike) -> NDArray | float:
        """J(x, θ) = φ(x) - (θx - ψ(θ)) ≥ 0."""
        return _out(self._divergence(self.check_mean(x), np.asarray(theta, dtype=float)))

    def _divergence(self: Self, x: NDArray, theta: NDArray) -> NDArray:
        x, theta = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(theta, dtype=float))
        infinite = np.isinf(theta)
        finite_theta = np.where(infinite, self.reference_theta, theta)
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            value = self._conjugate(x) - finite_theta * x + self._psi(finite_theta)
        value = np.maximum(value, 0.0)
        if np.any(infinite):
            # The infimum over Θ is only approached at the boundary of the
            # mean domain.
            hat = self._mean_inverse(x)
            value = np.where(infinite, np.where(theta == hat, 0.0, np.inf), value)
        return value

    def kl_divergence(self: Self, theta: ArrayLike, theta_tilde: ArrayLike) -> NDArray | float:
        """Kullback-Leibler divergence D(θ‖θ̃) = ψ(θ̃) - ψ(θ) - (θ̃ - θ) m(θ)."""
        a = self.check_theta(theta)
        b = self.check_theta(theta_tilde)
        value = self._psi(b) - self._psi(a) - (b - a) * self._mean(a)
        return _out(np.maximum(value, 0.0))

    # ==========================================================================
    # Local likelihood ratio statistic
    ##
    def local_scale(self: Self, counts: ArrayLike) -> NDArray:  # noqa: PLR6301
        """
        Factor ρ(m) turning count · J into the local statistic of an interval
        with m observations. It is 1 for independent observations.
        """
        return np.ones_like(np.asarray(counts, dtype=float))

    def local_stat(self: Self, inp: LocalStatInput) -> float:
        """T = count · J(sample mean, θ₀) for a single interval."""
        theta0 = self.check_theta(inp.theta0)
        x = self.check_mean(inp.sample_mean)
        return float(inp.count * self.local_scale(inp.count) * self._divergence(x, theta0))

    def local_stats(self: Self, means: NDArray, counts: NDArray, theta: NDArray) -> NDArray:
        """Vectorised local statistics without domain checks."""
        counts = np.asarray(counts, dtype=float)
        return counts * self.local_scale(counts) * self._divergence(means, theta)

    def neg_loglik(self: Self, means: NDArray, counts: NDArray, theta: NDArray) -> NDArray:
        """
        Negative log-likelihood count · (ψ(θ) - θ x̄) of a segment, written as
        count · (J(x̄, θ) - φ(x̄)) so that boundary values stay finite.
        """
        counts = np.asarray(counts, dtype=float)
        return counts * (self._divergence(means, theta) - self._conjugate(means))

    # ==========================================================================
    # Sublevel sets of the divergence
    ##
    def feasible_interval(self: Self, sample_mean: float, count: int, threshold: float) -> ValueInterval:
        """
        The set {θ : J(sample_mean, θ) ≤ threshold} as closed θ-interval.

        :raises NegativeThresholdError: if ``threshold`` is negative.
        """
        if threshold < 0:
            raise NegativeThresholdError(f"threshold={threshold!r} must not be negative")
        x = self.check_mean(sample_mean)
        lower, upper = self.feasible_bounds(
            np.atleast_1d(x),
            np.atleast_1d(np.asarray(count, dtype=float)),
            np.atleast_1d(np.asarray(threshold, dtype=float)),
        )
        return ValueInterval(lower=float(lower[0]), upper=float(upper[0]))

    def feasible_bounds(
        self: Self,
        means: NDArray,
        counts: NDArray,
        thresholds: NDArray,
    ) -> tuple[NDArray, NDArray]:
        """
        Vectorised sublevel sets of θ ↦ J(x, θ).

        ``thresholds`` are per-observation bounds on J; NaN or negative
        entries mark infeasible intervals (empty result), ``+inf`` marks
        unconstrained ones (the whole of Θ).
        """
        means, counts, thresholds = np.broadcast_arrays(
            np.asarray(means, dtype=float),
            np.asarray(counts, dtype=float),
            np.asarray(thresholds, dtype=float),
        )
        level = thresholds / self.local_scale(counts)
        lower = np.full(means.shape, np.inf)
        upper = np.full(means.shape, -np.inf)

        unconstrained = np.isposinf(level)
        lower[unconstrained] = self.theta_domain[0]
        upper[unconstrained] = self.theta_domain[1]

        active = np.isfinite(level) & (level >= 0) & np.isfinite(self._conjugate(means))
        if not np.any(active):
            return lower, upper

        x = means[active]
        c = level[active]
        low, high = self._solve_bounds(x, c)
        lower[active] = low
        upper[active] = high
        return lower, upper

    def _solve_bounds(self: Self, x: NDArray, c: NDArray) -> tuple[NDArray, NDArray]:
        """Monotone bisection on both sides of m⁻¹(x)."""
        hat = self._mean_inverse(x)
        lower = self._solve_side(x, c, hat, direction=-1.0)
        upper = self._solve_side(x, c, hat, direction=1.0)
        degenerate = c == 0
        lower[degenerate] = hat[degenerate]
        upper[degenerate] = hat[degenerate]
        return lower, upper

    def _solve_side(self: Self, x: NDArray, c: NDArray, hat: NDArray, direction: float) -> NDArray:
        """
        Find the root of J(x, ·) = c on one side of the minimiser. Returns
        the end of the final bracket that still lies inside the sublevel set.
        """
        bound = self.theta_domain[1] if direction > 0 else self.theta_domain[0]
        result = np.full(x.shape, bound)
        if direction > 0:
            # J vanishes towards +∞ only for the upper boundary mean.
            open_end = hat == np.inf
        else:
            open_end = hat == -np.inf
        todo = ~open_end
        if not np.any(todo):
            return result

        x, c, hat = x[todo], c[todo], hat[todo]

        # Inner point with J ≤ c. Boundary means on the opposite side have
        # an infinite minimiser, search a finite point instead.
        inner = np.where(np.isfinite(hat), hat, self.reference_theta)
        step = np.maximum(1.0, np.abs(inner))
        for _ in range(MAX_ITERATIONS):
            bad = self._divergence(x, inner) > c
            if not np.any(bad):
                break
            inner = np.where(bad, inner - direction * step, inner)
            step = np.where(bad, 2.0 * step, step)

        # Outer point with J ≥ c, expanded geometrically or towards a
        # finite end of Θ.
        step = np.maximum(1.0, np.abs(inner))
        outer = self._towards(inner, step, direction, bound)
        for _ in range(MAX_ITERATIONS):
            short = self._divergence(x, outer) < c
            if not np.any(short):
                break
            LOG.debug("Expanding %d brackets", int(np.count_nonzero(short)))
            step = np.where(short, 2.0 * step, step)
            outer = np.where(short, self._towards(inner, step, direction, bound), outer)

        width = float(np.max(np.abs(outer - inner)))
        iterations = MAX_ITERATIONS if width <= 0 else min(MAX_ITERATIONS, max(0, ceil(log2(width / THETA_TOLERANCE))))
        for _ in range(iterations):
            middle = 0.5 * (inner + outer)
            inside = self._divergence(x, middle) <= c
            inner = np.where(inside, middle, inner)
            outer = np.where(inside, outer, middle)

        result[todo] = inner
        return result

    @staticmethod
    def _towards(start: NDArray, step: NDArray, direction: float, bound: float) -> NDArray:
        if np.isfinite(bound):
            # Approach the finite end of Θ without reaching it.
            gap = np.abs(bound - start)
            return bound - direction * gap / (1.0 + step)
        return start + direction * step


def _out(value: NDArray) -> NDArray | float:
    """Unwrap 0-d arrays into floats."""
    arr = np.asarray(value)
    return float(arr) if arr.ndim == 0 else arr
