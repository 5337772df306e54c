# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
JSON document written by ``smuce fit``. Non-finite values (one-sided band
ends, boundary parameters such as θ = -∞ for a Poisson segment of zeros)
are stored as ``null``.
"""

from __future__ import annotations

from math import isfinite
from pathlib import Path
from typing import Self

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field, model_validator

from smuce.services.confidence import ConfidenceRegion
from smuce.services.segdp import StepFit

#: Bumped on incompatible changes only
SCHEMA = "smuce-fit/1"


def finite_or_none(value: float) -> float | None:
    value = float(value)
    return value if isfinite(value) else None


class SegmentRecord(BaseModel):
    start: int = Field(..., ge=0)
    #: Exclusive
    end: int
    value_mean: float | None
    value_theta: float | None


class JumpIntervalRecord(BaseModel):
    left: int = Field(..., ge=0)
    right: int


class BandRecord(BaseModel):
    index: int = Field(..., ge=0)
    lower: float | None
    upper: float | None


class NullProvenance(BaseModel):
    """Null table the threshold was derived from."""

    n: int
    reps: int
    seed: int


class FitDocument(BaseModel):
    """Fit, jump intervals and confidence band of one series."""

    schema_id: str = SCHEMA
    version: str
    input_path: str | None = None
    n: int = Field(..., ge=1)
    family: dict[str, float | str]
    mode: str
    min_scale: float | None
    q: float
    alpha: float | None = None
    seed: int | None = None
    null_table: NullProvenance | None = None
    k_hat: int = Field(..., ge=0)
    achieved_stat: float
    segments: list[SegmentRecord]
    jump_intervals: list[JumpIntervalRecord]
    band: list[BandRecord]

    @model_validator(mode="after")
    def validate_tiling(self: Self) -> Self:
        position = 0
        for segment in self.segments:
            if segment.start != position or segment.end <= segment.start:
                raise ValueError("segments must tile 0..n")
            position = segment.end
        if position != self.n:
            raise ValueError("segments must tile 0..n")
        if len(self.segments) != self.k_hat + 1 or len(self.jump_intervals) != self.k_hat:
            raise ValueError("k_hat does not match the segments")
        if len(self.band) != self.n:
            raise ValueError("one band entry per sample is required")
        return self

    @classmethod
    def from_fit(  # noqa: PLR0913
        cls: type[Self],
        fit: StepFit,
        region: ConfidenceRegion,
        *,
        family: dict[str, float | str],
        version: str,
        input_path: Path | str | None = None,
        seed: int | None = None,
        null_table: NullProvenance | None = None,
    ) -> Self:
        lower, upper = region.band_arrays()
        return cls(
            version=version,
            input_path=None if input_path is None else str(input_path),
            n=fit.n,
            family=family,
            mode=fit.mode.value,
            min_scale=fit.min_scale,
            q=fit.q_used,
            alpha=region.alpha,
            seed=seed,
            null_table=null_table,
            k_hat=fit.k_hat,
            achieved_stat=fit.achieved_stat,
            segments=[
                SegmentRecord(
                    start=start,
                    end=end,
                    value_mean=finite_or_none(mean),
                    value_theta=finite_or_none(theta),
                )
                for (start, end), mean, theta in zip(
                    fit.step.segments(),
                    fit.values_mean,
                    fit.step.values_theta,
                    strict=True,
                )
            ],
            jump_intervals=[JumpIntervalRecord(left=left, right=right) for left, right in region.jump_intervals],
            band=[
                BandRecord(index=i, lower=finite_or_none(lo), upper=finite_or_none(hi))
                for i, (lo, hi) in enumerate(zip(lower, upper, strict=True))
            ],
        )

    def to_json(self: Self) -> str:
        return self.model_dump_json(indent=2) + "\n"

    @classmethod
    def from_json(cls: type[Self], text: str) -> Self:
        return cls.model_validate_json(text)

    def fitted_means(self: Self) -> NDArray:
        """Per-sample fitted means, NaN where the mean is not finite."""
        values = [np.nan if s.value_mean is None else s.value_mean for s in self.segments]
        return np.repeat(np.asarray(values, dtype=float), [s.end - s.start for s in self.segments])

    def in_jump_interval(self: Self) -> NDArray:
        flags = np.zeros(self.n, dtype=bool)
        for interval in self.jump_intervals:
            flags[interval.left : interval.right + 1] = True
        return flags
