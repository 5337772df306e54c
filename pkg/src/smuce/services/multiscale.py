# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
Multiscale statistic of a candidate step function.

The statistic is the maximum over all intervals that lie inside one constant
segment of the candidate (and are at least ``min_scale · n`` samples long)
of the scale calibrated local likelihood ratio statistic. Interval sums come
from prefix sums, so every interval costs O(1) and a full sweep O(n²).
"""

from __future__ import annotations

from enum import StrEnum
from logging import getLogger
from math import ceil, e, log, sqrt
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from smuce.exceptions import DomainError
from smuce.expfam.base import ExpFamily
from smuce.expfam.gaussian import ma1_local_scale

LOG = getLogger(__name__)

__all__ = [
    "PenaltyMode",
    "StepFunction",
    "calibrate",
    "ma1_local_scale",
    "min_length",
    "multiscale_stat",
    "penalty",
    "stat_floor",
]


class PenaltyMode(StrEnum):
    """Scale calibration of the local statistics."""

    SQRT = "sqrt"  #: √(2T) - √(2 log(en/ℓ))
    LOGLOG = "loglog"  #: (T - 2 log(n/ℓ)) / log log(eᵉ n/ℓ)
    UNCALIBRATED = "uncalibrated"  #: √(2T)


class StepFunction(BaseModel):
    """
    Right-continuous step function on the grid 0, …, n-1, given by the
    0-based start indices of its segments and one natural parameter per
    segment.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    boundaries: list[int] = Field(..., min_length=1)
    values_theta: list[float] = Field(..., min_length=1)

    @model_validator(mode="after")
    def validate_segments(self: Self) -> Self:
        if self.boundaries[0] != 0:
            raise ValueError("the first segment must start at index 0")
        if any(b >= a for a, b in zip(self.boundaries[1:], self.boundaries, strict=False)):
            raise ValueError("segment starts must be strictly increasing")
        if self.boundaries[-1] >= self.n:
            raise ValueError(f"segment start {self.boundaries[-1]} outside 0..{self.n - 1}")
        if len(self.values_theta) != len(self.boundaries):
            raise ValueError("one value per segment is required")
        return self

    @property
    def k(self: Self) -> int:
        """Number of jumps."""
        return len(self.boundaries) - 1

    @property
    def change_points(self: Self) -> list[int]:
        return self.boundaries[1:]

    def segments(self: Self) -> list[tuple[int, int]]:
        """Half-open index ranges [start, end) of the segments."""
        ends = [*self.boundaries[1:], self.n]
        return list(zip(self.boundaries, ends, strict=True))

    def expand(self: Self) -> NDArray:
        """Per-sample natural parameters."""
        lengths = np.diff([*self.boundaries, self.n])
        return np.repeat(np.asarray(self.values_theta, dtype=float), lengths)


def min_length(min_scale: float | None, n: int) -> int:
    """Smallest interval length ⌈min_scale · n⌉ entering the statistic."""
    if min_scale is None:
        return 1
    if not 0 < min_scale <= 1:
        raise DomainError(f"min_scale={min_scale!r} must lie in (0, 1]")
    # rounding guards 1/n · n = 1.0000000000000002
    return max(1, ceil(round(min_scale * n, 9)))


def penalty(length: int, n: int, mode: PenaltyMode = PenaltyMode.SQRT) -> float | tuple[float, float]:
    """
    Scale calibrating term of an interval with ``length`` samples.

    For the loglog mode the pair (offset, divisor) is returned which is
    applied to T directly instead of to √(2T).
    """
    if not 1 <= length <= n:
        raise DomainError(f"length={length} must lie in 1..{n}")
    if mode is PenaltyMode.SQRT:
        return sqrt(2.0 * log(e * n / length))
    if mode is PenaltyMode.UNCALIBRATED:
        return 0.0
    return 2.0 * log(n / length), log(log(e**e * n / length))


def calibrate(stats: ArrayLike, lengths: ArrayLike, n: int, mode: PenaltyMode) -> NDArray:
    """Turn local statistics T of intervals with the given lengths into scores."""
    t = np.asarray(stats, dtype=float)
    ell = np.asarray(lengths, dtype=float)
    if mode is PenaltyMode.SQRT:
        return np.sqrt(2.0 * t) - np.sqrt(2.0 * np.log(e * n / ell))
    if mode is PenaltyMode.UNCALIBRATED:
        return np.sqrt(2.0 * t)
    return (t - 2.0 * np.log(n / ell)) / np.log(np.log(e**e * n / ell))


def stat_floor(n: int, mode: PenaltyMode = PenaltyMode.SQRT) -> float:
    """Score of a single observation fitted exactly, -√(2 log(en)) in sqrt mode."""
    return float(calibrate(0.0, 1, n, mode))


def multiscale_stat(
    data: ArrayLike,
    family: ExpFamily,
    cand: StepFunction,
    min_scale: float | None = None,
    mode: PenaltyMode = PenaltyMode.SQRT,
) -> float:
    """
    Multiscale statistic of ``cand`` on ``data`` (sufficient statistics,
    e.g. Y² for the Gaussian variance family).

    :return: the maximal score, ``-inf`` if no interval is long enough
    :raises DomainError: on a length mismatch or a value outside Θ
    """
    y = np.asarray(data, dtype=float)
    if y.shape != (cand.n,):
        raise DomainError(f"data of length {y.size} does not match a step function on n={cand.n}")
    family.check_theta(cand.values_theta, allow_boundary=True)
    n = cand.n
    shortest = min_length(min_scale, n)
    best = -np.inf
    for (start, end), theta in zip(cand.segments(), cand.values_theta, strict=True):
        cumsum = np.concatenate(([0.0], np.cumsum(y[start:end])))
        for ell in range(shortest, end - start + 1):
            means = (cumsum[ell:] - cumsum[:-ell]) / ell
            stats = family.local_stats(means, ell, theta)
            best = max(best, float(np.max(calibrate(stats, ell, n, mode))))
    return best
