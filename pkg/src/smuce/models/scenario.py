# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""Simulation scenarios and their reports."""

from __future__ import annotations

from typing import Self

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from smuce.services.multiscale import PenaltyMode

SCENARIO_FAMILIES = ("gauss-mean", "gauss-variance", "poisson", "bernoulli")


class Scenario(BaseModel):
    """
    A true step function, a noise model and the fit settings. Segment
    values are on the reporting scale: means for gauss-mean, variances for
    gauss-variance, intensities for poisson and success probabilities for
    bernoulli.

    Observation i (1-based) of a Gaussian mean scenario is drawn from

        N(ϑ(i) + 0.25 b sin(a π i), σ²)

    with MA(1) noise εᵢ + β εᵢ₋₁ if ``noise_ma_beta`` is set.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    description: str = ""
    family: str
    n: int = Field(..., ge=2)
    #: 0-based index of the first sample of every new segment
    change_points: list[int] = []
    values: list[float] = Field(..., min_length=1)
    sigma: float = 1.0
    trend_a: float = 0.0
    trend_b: float = 0.0
    noise_ma_beta: float | None = None
    #: MA(1) coefficient assumed by the fit, None for the independent model
    fit_ma_beta: float | None = None

    #: 1-α; q is its quantile of the null table
    level: float | None = None
    q: float | None = None
    auto_q: bool = False
    min_scale: float | None = None
    mode: PenaltyMode = PenaltyMode.SQRT

    reps: int = Field(500, ge=1)
    seed: int = Field(0, ge=0)
    #: The signal approximates one only shown graphically in the literature
    stand_in: bool = False

    @field_validator("family")
    @classmethod
    def validate_family(cls, value: str) -> str:
        if value not in SCENARIO_FAMILIES:
            raise ValueError(f"family must be one of: {', '.join(SCENARIO_FAMILIES)}")
        return value

    @model_validator(mode="after")
    def validate_signal(self: Self) -> Self:
        points = [0, *self.change_points]
        if any(b <= a for a, b in zip(points, points[1:], strict=False)) or points[-1] >= self.n:
            raise ValueError("change_points must be increasing and inside 1..n-1")
        if len(self.values) != len(self.change_points) + 1:
            raise ValueError("one value per segment is required")
        if sum((self.level is not None, self.q is not None, self.auto_q)) != 1:
            raise ValueError("exactly one of level, q and auto_q must be given")
        if self.level is not None and not 0 < self.level < 1:
            raise ValueError("level must be between 0 and 1 (exclusive)")
        if (self.noise_ma_beta is not None or self.fit_ma_beta is not None) and self.family != "gauss-mean":
            raise ValueError("MA(1) noise requires the gauss-mean family")
        return self

    @property
    def k(self: Self) -> int:
        return len(self.change_points)

    def truth(self: Self) -> NDArray:
        """Per-sample values of the true step function."""
        lengths = np.diff([0, *self.change_points, self.n])
        return np.repeat(np.asarray(self.values, dtype=float), lengths)

    def trend(self: Self) -> NDArray:
        i = np.arange(1, self.n + 1)
        return 0.25 * self.trend_b * np.sin(self.trend_a * np.pi * i)


class CoverageTriple(BaseModel):
    #: Fraction of replicates with K̂ = K, every change-point inside its
    #: jump interval and the true graph inside the band
    simultaneous: float
    correct_k: float
    #: ``simultaneous / correct_k``, None without a correct K̂
    conditional: float | None


class ScenarioReport(BaseModel):
    """Summary of the replicates of one scenario."""

    name: str
    family: str
    n: int
    k: int
    reps: int
    seed: int
    q: float
    level: float | None
    stand_in: bool
    #: Relative frequencies of K̂ - K, binned as ≤-3, -2, …, +2, ≥+3
    k_difference: dict[str, float]
    #: Relative frequencies of the individual values of K̂
    k_hat: dict[int, float]
    mise: float
    miae: float
    #: Fraction of replicates with K̂ ≥ 1
    detection_rate: float
    #: Fraction of replicates with K̂ ≥ K
    at_least_k: float
    coverage: CoverageTriple
