# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
Dynamic program computing the minimal number of jumps K̂(q) and the
constrained maximum likelihood step function with exactly K̂ jumps.

Both stages share one sweep over the right interval end p. For every p the
running intersections

    B̲_{r,p} = max(B̲_{r,p-1}, B̲_{r+1,p}, b̲_{r,p})
    B̄_{r,p} = min(B̄_{r,p-1}, B̄_{r+1,p}, b̄_{r,p})

are kept for r ≥ r_min(p-1) only. [r, p] is a feasible segment iff
B̲_{r,p} ≤ B̄_{r,p}, and infeasibility is inherited by every interval
containing [r, p], so the feasible starts form the suffix r ≥ r_min(p).

Stage 1 counts the minimal jumps of every prefix, stage 2 minimises the
negative log-likelihood over (prefix, jumps used) with the jumps limited to
K̂. A single-pass variant with a jump penalty γ is kept as
:func:`fit_penalized`.
"""

from __future__ import annotations

from collections.abc import Iterator
from logging import getLogger
from math import e, log, sqrt
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from smuce.exceptions import DomainError, InfeasibleThresholdError, NoFeasibleFitError
from smuce.expfam.base import ExpFamily
from smuce.interfaces.segment_model import ISegmentModel
from smuce.services.multiscale import (
    PenaltyMode,
    StepFunction,
    min_length,
    multiscale_stat,
    stat_floor,
)

LOG = getLogger(__name__)


# ==============================================================================
# Thresholds
##
def threshold_table(q: float, n: int, mode: PenaltyMode = PenaltyMode.SQRT, shortest: int = 1) -> NDArray:
    """
    Per-observation thresholds of the local statistic indexed by the interval
    length (entry 0 is unused). NaN marks lengths where the constraint cannot
    be met, ``inf`` lengths below ``shortest`` which are not constrained.
    """
    ell = np.arange(1, n + 1, dtype=float)
    if mode is PenaltyMode.SQRT:
        level = q + np.sqrt(2.0 * np.log(e * n / ell))
        values = np.where(level >= 0, np.square(level) / (2.0 * ell), np.nan)
    elif mode is PenaltyMode.UNCALIBRATED:
        values = np.full(n, q * q / 2.0 if q >= 0 else np.nan) / ell
    else:
        level = q * np.log(np.log(e**e * n / ell)) + 2.0 * np.log(n / ell)
        values = np.where(level >= 0, level / ell, np.nan)
    values[: shortest - 1] = np.inf
    return np.concatenate(([np.nan], values))


def interval_threshold(
    q: float,
    length: int,
    n: int,
    mode: PenaltyMode = PenaltyMode.SQRT,
    min_scale: float | None = None,
) -> float | None:
    """
    Bound on J(Ȳ, θ) for an interval with ``length`` samples implied by
    score ≤ q, i.e. (q + penalty)² / (2 · length) in sqrt mode.

    :return: the threshold, ``inf`` for unconstrained lengths, ``None`` if
        no segment value meets the constraint (q + penalty < 0)
    """
    if not 1 <= length <= n:
        raise DomainError(f"length={length} must lie in 1..{n}")
    value = threshold_table(q, n, mode, min_length(min_scale, n))[length]
    return None if np.isnan(value) else float(value)


# ==============================================================================
# Exponential family regression
##
class ExpFamilyModel(ISegmentModel):
    """
    Change-point problem for observations from a one-parameter exponential
    family. ``data`` are the sufficient statistics, segment values live in
    θ-space.
    """

    def __init__(
        self: Self,
        data: ArrayLike,
        family: ExpFamily,
        q: float,
        min_scale: float | None = None,
        mode: PenaltyMode = PenaltyMode.SQRT,
    ) -> None:
        y = np.asarray(data, dtype=float)
        if y.ndim != 1 or y.size < 1:
            raise DomainError("data must be a non-empty vector")
        family.validate_data(y)
        self.data = y
        self.family = family
        self.n = y.size
        self.q = float(q)
        self.min_scale = min_scale
        self.mode = PenaltyMode(mode)
        self._cumsum = np.concatenate(([0.0], np.cumsum(y)))
        self._conj_cumsum = np.concatenate(([0.0], np.cumsum(family._conjugate(y))))  # noqa: SLF001
        self._levels = threshold_table(self.q, self.n, self.mode, min_length(min_scale, self.n))

    def __repr__(self: Self) -> str:
        return f"ExpFamilyModel(n={self.n}, family={self.family!r}, q={self.q}, mode={self.mode.value})"

    def check_threshold(self: Self) -> None:
        if np.isnan(self._levels[1]):
            raise InfeasibleThresholdError(self.q, stat_floor(self.n, self.mode))

    def _window(self: Self, r_lo: int, p: int) -> tuple[NDArray, NDArray]:
        lengths = np.arange(p + 1 - r_lo, 0, -1)
        means = (self._cumsum[p + 1] - self._cumsum[r_lo : p + 1]) / lengths
        low, high = self.family.mean_domain
        return np.clip(means, low, high), lengths

    def interval_bounds(self: Self, r_lo: int, p: int) -> tuple[NDArray, NDArray]:
        means, lengths = self._window(r_lo, p)
        return self.family.feasible_bounds(means, lengths, self._levels[lengths])

    def segment_values(self: Self, r_lo: int, p: int, lower: NDArray, upper: NDArray) -> NDArray:
        means, _ = self._window(r_lo, p)
        return np.clip(self.family._mean_inverse(means), lower, upper)  # noqa: SLF001

    def segment_costs(self: Self, r_lo: int, p: int, values: NDArray) -> NDArray:
        means, lengths = self._window(r_lo, p)
        return self.family.neg_loglik(means, lengths, values)

    def segment_shift(self: Self, r_lo: int, p: int) -> NDArray:
        """
        Σ φ(yᵢ) over the segments [r, p]. Adding it makes every segment
        cost nonnegative without changing any comparison between
        segmentations.
        """
        return self._conj_cumsum[p + 1] - self._conj_cumsum[r_lo : p + 1]

    def to_mean(self: Self, values: NDArray) -> NDArray:
        return np.asarray(self.family.mean(values, allow_boundary=True), dtype=float)

    def multiscale_stat(self: Self, step: StepFunction) -> float:
        return multiscale_stat(self.data, self.family, step, self.min_scale, self.mode)

    def reversed(self: Self) -> Self:
        return type(self)(self.data[::-1].copy(), self.family, self.q, self.min_scale, self.mode)

    def sufficient_gamma(self: Self) -> float:
        """
        γ > ½(nq + n√(2 log(en)))² + l(Y, m⁻¹(Ȳ)) with the log-likelihood
        shifted to be nonnegative, where the shifted value at the overall
        maximum likelihood estimate is Σ φ(yᵢ) - n φ(Ȳ).
        """
        n = self.n
        finite = np.isfinite(self._levels[1:])
        ell = np.arange(1, n + 1)[finite]
        segment_max = ell * self._levels[1:][finite] / self.family.local_scale(ell) if ell.size else np.zeros(1)
        bound = max(0.5 * (n * self.q + n * sqrt(2.0 * log(e * n))) ** 2, n * float(np.max(segment_max)))
        mean = np.clip(self._cumsum[-1] / n, *self.family.mean_domain)
        gap = float(np.sum(self.family._conjugate(self.data)) - n * self.family._conjugate(mean))  # noqa: SLF001
        return bound + max(gap, 0.0) + 1.0


# ==============================================================================
# Results
##
class MinJumps(BaseModel):
    """Result of the feasibility stage."""

    k_hat: int = Field(..., ge=0)
    #: Minimal number of jumps of a feasible fit of the prefix 0..p
    prefix_jumps: list[int]
    #: Smallest r such that [r, p] is a feasible segment
    r_min: list[int]


class StepFit(BaseModel):
    """Constrained maximum likelihood step function with K̂ jumps."""

    model_config = ConfigDict(frozen=True)

    step: StepFunction
    #: Segment values on the reporting scale (means, variances, intensities, …)
    values_mean: list[float]
    #: Running intersections [B̲, B̄] of the segments in value space
    segment_bounds: list[tuple[float, float]]
    k_hat: int = Field(..., ge=0)
    q_used: float
    achieved_stat: float
    loglik: float
    prefix_jumps: list[int]
    r_min: list[int]
    min_scale: float | None = None
    mode: PenaltyMode = PenaltyMode.SQRT

    @property
    def n(self: Self) -> int:
        return self.step.n

    def fitted_means(self: Self) -> NDArray:
        """Per-sample fitted values on the reporting scale."""
        lengths = np.diff([*self.step.boundaries, self.step.n])
        return np.repeat(np.asarray(self.values_mean, dtype=float), lengths)


# ==============================================================================
# Sweeps
##
def sweep_bounds(
    model: ISegmentModel,
    start: int = 0,
    stop: int | None = None,
) -> Iterator[tuple[int, int, NDArray, NDArray]]:
    """
    Sweep p = start, …, stop-1 and yield ``(p, r_min, lower, upper)`` where
    ``lower[i]``, ``upper[i]`` are B̲, B̄ of the feasible segment
    [r_min + i, p]. Only intervals inside [start, stop) are considered.

    :raises NoFeasibleFitError: if a single observation is infeasible
    """
    stop = model.n if stop is None else stop
    r_lo = start
    lower = np.empty(0)
    upper = np.empty(0)
    for p in range(start, stop):
        b_lower, b_upper = model.interval_bounds(r_lo, p)
        lower = np.maximum(np.append(lower, -np.inf), b_lower)
        upper = np.minimum(np.append(upper, np.inf), b_upper)
        lower = np.maximum.accumulate(lower[::-1])[::-1]
        upper = np.minimum.accumulate(upper[::-1])[::-1]
        feasible = lower <= upper
        if not feasible[-1]:
            raise NoFeasibleFitError(f"the observation at index {p} alone violates the multiscale constraint")
        first = int(np.argmax(feasible))
        if first:
            r_lo += first
            lower = lower[first:]
            upper = upper[first:]
        yield p, r_lo, lower, upper


def block_bounds(model: ISegmentModel, start: int, stop: int) -> tuple[float, float]:
    """Running intersection [B̲, B̄] of the segment [start, stop] (empty if infeasible)."""
    result = (np.inf, -np.inf)
    for _, r_lo, lower, upper in sweep_bounds(model, start, stop + 1):
        result = (float(lower[0]), float(upper[0])) if r_lo == start else (np.inf, -np.inf)
    return result


def min_jumps(model: ISegmentModel) -> MinJumps:
    """
    Minimal number of jumps K̂ of a step function satisfying the multiscale
    constraint, together with the per-prefix counts.

    :raises InfeasibleThresholdError: if q is below the attainable minimum
    """
    model.check_threshold()
    prefix = np.empty(model.n, dtype=int)
    r_min = np.empty(model.n, dtype=int)
    for p, r_lo, _, _ in sweep_bounds(model):
        r_min[p] = r_lo
        prefix[p] = 0 if r_lo == 0 else prefix[r_lo - 1] + 1
        if p and r_min[p] < r_min[p - 1]:
            raise AssertionError("r_min must be non-decreasing")
    LOG.debug("Minimal number of jumps: %d", prefix[-1])
    return MinJumps(k_hat=int(prefix[-1]), prefix_jumps=prefix.tolist(), r_min=r_min.tolist())


def fit_smuce(model: ISegmentModel) -> StepFit:
    """
    The SMUCE: among all step functions with K̂ jumps satisfying the
    multiscale constraint, the one maximising the likelihood. Each segment
    value is the clamp of the segment's maximum likelihood estimate into
    its running intersection [B̲, B̄]. Ties are broken towards the smallest
    last change-point, recursively.
    """
    counts = min_jumps(model)
    n, k_hat = model.n, counts.k_hat
    cost = np.full((k_hat + 1, n), np.inf)
    start = np.zeros((k_hat + 1, n), dtype=int)
    value = np.zeros((k_hat + 1, n))
    bounds = np.zeros((k_hat + 1, n, 2))

    for p, r_lo, lower, upper in sweep_bounds(model):
        vals = model.segment_values(r_lo, p, lower, upper)
        costs = model.segment_costs(r_lo, p, vals)
        k_first = counts.prefix_jumps[p]
        if r_lo == 0 and k_first == 0:
            cost[0, p] = costs[0]
            value[0, p] = vals[0]
            bounds[0, p] = lower[0], upper[0]
        ks = np.arange(max(k_first, 1), min(k_hat, p) + 1)
        if not ks.size:
            continue
        offset = 1 if r_lo == 0 else 0
        starts = np.arange(r_lo + offset, p + 1)
        total = cost[np.ix_(ks - 1, starts - 1)] + costs[offset:][None, :]
        best = np.argmin(total, axis=1)
        cost[ks, p] = total[np.arange(ks.size), best]
        start[ks, p] = starts[best]
        value[ks, p] = vals[offset + best]
        bounds[ks, p, 0] = lower[offset + best]
        bounds[ks, p, 1] = upper[offset + best]

    if not np.isfinite(cost[k_hat, n - 1]):
        raise NoFeasibleFitError(f"no feasible fit with {k_hat} jumps")

    segments: list[tuple[int, float, tuple[float, float]]] = []
    k, p = k_hat, n - 1
    while p >= 0:
        r = int(start[k, p])
        segments.append((r, float(value[k, p]), (float(bounds[k, p, 0]), float(bounds[k, p, 1]))))
        p, k = r - 1, k - 1
    segments.reverse()
    return _assemble(model, segments, counts)


def fit_penalized(model: ISegmentModel, gamma: float | None = None) -> StepFit:
    """
    Single-pass penalised dynamic program

        B(p) = min_r B(r-1) + γ + d*_{[r,p]},   B(-1) = -γ,

    with d* the (shifted, nonnegative) cost of the clamped segment optimum
    and d* = ∞ for infeasible segments. For γ above :meth:`sufficient_gamma` the
    solution has the minimal number of jumps and coincides with
    :func:`fit_smuce`.
    """
    model.check_threshold()
    gamma = model.sufficient_gamma() if gamma is None else float(gamma)
    n = model.n
    best = np.empty(n + 1)
    best[0] = -gamma
    start = np.zeros(n, dtype=int)
    value = np.zeros(n)
    bounds = np.zeros((n, 2))
    prefix = np.empty(n, dtype=int)
    r_min = np.empty(n, dtype=int)

    for p, r_lo, lower, upper in sweep_bounds(model):
        r_min[p] = r_lo
        prefix[p] = 0 if r_lo == 0 else prefix[r_lo - 1] + 1
        vals = model.segment_values(r_lo, p, lower, upper)
        costs = model.segment_costs(r_lo, p, vals)
        costs = costs + model.segment_shift(r_lo, p)
        total = best[r_lo : p + 1] + gamma + costs
        i = int(np.argmin(total))
        best[p + 1] = total[i]
        start[p] = r_lo + i
        value[p] = vals[i]
        bounds[p] = lower[i], upper[i]

    segments: list[tuple[int, float, tuple[float, float]]] = []
    p = n - 1
    while p >= 0:
        r = int(start[p])
        segments.append((r, float(value[p]), (float(bounds[p, 0]), float(bounds[p, 1]))))
        p = r - 1
    segments.reverse()
    counts = MinJumps(k_hat=int(prefix[-1]), prefix_jumps=prefix.tolist(), r_min=r_min.tolist())
    return _assemble(model, segments, counts)


def sufficient_gamma(model: ISegmentModel) -> float:
    """Jump penalty making :func:`fit_penalized` minimise the number of jumps first."""
    return model.sufficient_gamma()


def smuce(
    data: ArrayLike,
    family: ExpFamily,
    q: float,
    min_scale: float | None = None,
    mode: PenaltyMode = PenaltyMode.SQRT,
) -> StepFit:
    """Convenience wrapper fitting exponential family data."""
    return fit_smuce(ExpFamilyModel(data, family, q, min_scale, mode))


def _loglik(model: ISegmentModel, step: StepFunction) -> float:
    total = 0.0
    for (first, end), theta in zip(step.segments(), step.values_theta, strict=True):
        costs = model.segment_costs(first, end - 1, np.array([theta]))
        total += float(costs[0])
    return -total


def _assemble(
    model: ISegmentModel,
    segments: list[tuple[int, float, tuple[float, float]]],
    counts: MinJumps,
) -> StepFit:
    boundaries = [r for r, _, _ in segments]
    values = [v for _, v, _ in segments]
    step = StepFunction(n=model.n, boundaries=boundaries, values_theta=values)
    achieved = model.multiscale_stat(step)
    if achieved > model.q + 1e-8 * max(1.0, abs(model.q)):
        raise NoFeasibleFitError(f"fit violates the constraint: statistic {achieved} > q={model.q}")
    LOG.debug("Fit with %d jumps, statistic %.6f", step.k, achieved)
    return StepFit(
        step=step,
        values_mean=model.to_mean(np.asarray(values)).tolist(),
        segment_bounds=[b for _, _, b in segments],
        k_hat=step.k,
        q_used=model.q,
        achieved_stat=achieved,
        loglik=_loglik(model, step),
        prefix_jumps=counts.prefix_jumps,
        r_min=counts.r_min,
        min_scale=model.min_scale,
        mode=model.mode,
    )
