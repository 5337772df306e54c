# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
Interface between the segmentation dynamic program and the statistical
model of the observations.

The dynamic program only ever asks three things about an interval [r, p]:
which segment values pass the local constraint of that interval, which
value inside the running intersection of all those constraints is the best
one and what it costs. Both the exponential family regression and the
quantile regression in data space answer these questions.
"""

from abc import ABC, abstractmethod
from typing import Self

import numpy as np
from numpy.typing import NDArray

from smuce.services.multiscale import PenaltyMode, StepFunction


class ISegmentModel(ABC):
    """Data and constraint of one change-point problem."""

    #: Number of observations
    n: int
    #: Threshold q of the multiscale constraint
    q: float
    #: Fraction c_n of n below which intervals are not constrained
    min_scale: float | None
    mode: PenaltyMode

    @abstractmethod
    def check_threshold(self: Self) -> None:
        """
        Raise :class:`~smuce.exceptions.InfeasibleThresholdError` if not even
        n singleton segments satisfy the constraint.
        """
        raise NotImplementedError("This method must be implemented in the concrete model class.")

    @abstractmethod
    def interval_bounds(self: Self, r_lo: int, p: int) -> tuple[NDArray, NDArray]:
        """
        Value bounds b̲, b̄ of the local constraints of all intervals [r, p]
        with r = r_lo, …, p. Empty constraints have ``lower > upper``,
        unconstrained intervals span the whole value space.
        """
        raise NotImplementedError("This method must be implemented in the concrete model class.")

    @abstractmethod
    def segment_values(self: Self, r_lo: int, p: int, lower: NDArray, upper: NDArray) -> NDArray:
        """
        Best value of the segments [r, p], r = r_lo, …, p, restricted to the
        running intersections [lower, upper] (which must not be empty).
        """
        raise NotImplementedError("This method must be implemented in the concrete model class.")

    @abstractmethod
    def segment_costs(self: Self, r_lo: int, p: int, values: NDArray) -> NDArray:
        """Negative log-likelihood (or loss) of the segments [r, p] at ``values``."""
        raise NotImplementedError("This method must be implemented in the concrete model class.")

    def segment_shift(self: Self, r_lo: int, p: int) -> NDArray:
        """
        Data dependent constant added to the segment costs when the
        penalised program needs them nonnegative. Zero for models whose
        costs are losses already.
        """
        return np.zeros(p + 1 - r_lo)

    @abstractmethod
    def to_mean(self: Self, values: NDArray) -> NDArray:
        """Map segment values to the reporting scale (means or data values)."""
        raise NotImplementedError("This method must be implemented in the concrete model class.")

    @abstractmethod
    def multiscale_stat(self: Self, step: StepFunction) -> float:
        """Multiscale statistic of a candidate step function on the data."""
        raise NotImplementedError("This method must be implemented in the concrete model class.")

    @abstractmethod
    def reversed(self: Self) -> Self:
        """The same problem on the time reversed observations."""
        raise NotImplementedError("This method must be implemented in the concrete model class.")

    @abstractmethod
    def sufficient_gamma(self: Self) -> float:
        """
        A jump penalty γ large enough that the penalised dynamic program
        returns a solution with the minimal number of jumps.
        """
        raise NotImplementedError("This method must be implemented in the concrete model class.")
