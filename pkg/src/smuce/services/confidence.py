# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
Confidence statements derived from a fit: disjoint index intervals that
contain the k-th change-point of every step function with K̂ jumps
satisfying the multiscale constraint, and a band containing the graphs of
all of them.

A change-point is the index of the first sample of a new segment. With

    R_k  = max{p : prefix_jumps[p] ≤ k-1}
    L_k  = r_min(R_k)
    L'_k = min{s : suffix_jumps[s] ≤ K̂-k}

the k-th change-point lies in [max(L_k, L'_k), R_k + 1] and these intervals
are pairwise disjoint.
"""

from __future__ import annotations

from logging import getLogger
from typing import Self

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from smuce.interfaces.segment_model import ISegmentModel
from smuce.services.segdp import StepFit, min_jumps, sweep_bounds

LOG = getLogger(__name__)


class ConfidenceRegion(BaseModel):
    """Jump intervals and band of a fit (0-based, inclusive intervals)."""

    model_config = ConfigDict(frozen=True)

    k_hat: int = Field(..., ge=0)
    jump_intervals: list[tuple[int, int]]
    #: Per-sample (lower, upper) on the reporting scale
    band: list[tuple[float, float]]
    q: float
    alpha: float | None = None

    @model_validator(mode="after")
    def validate_intervals(self: Self) -> Self:
        if len(self.jump_intervals) != self.k_hat:
            raise ValueError("one jump interval per change-point is required")
        for (left, right), (nxt, _) in zip(self.jump_intervals, self.jump_intervals[1:], strict=False):
            if not left <= right < nxt:
                raise ValueError("jump intervals must be sorted and disjoint")
        return self

    def band_arrays(self: Self) -> tuple[NDArray, NDArray]:
        band = np.asarray(self.band, dtype=float).reshape(-1, 2)
        return band[:, 0], band[:, 1]


def jump_intervals(fit: StepFit, model: ISegmentModel) -> list[tuple[int, int]]:
    """
    Disjoint intervals [left, right] of candidate change-point indices.

    The backward counts come from the feasibility stage on the reversed
    data.
    """
    k_hat = fit.k_hat
    if k_hat == 0:
        return []
    prefix = np.asarray(fit.prefix_jumps)
    r_min = np.asarray(fit.r_min)
    backward = np.asarray(min_jumps(model.reversed()).prefix_jumps)
    suffix = backward[::-1]  # suffix[s]: minimal jumps of the samples s..n-1

    intervals: list[tuple[int, int]] = []
    for k in range(1, k_hat + 1):
        right = int(np.searchsorted(prefix, k - 1, side="right")) - 1
        forward_left = int(r_min[right])
        backward_left = int(np.argmax(suffix <= k_hat - k))
        interval = (max(forward_left, backward_left), right + 1)
        intervals.append(interval)
    LOG.debug("Jump intervals: %s", intervals)
    return intervals


def confidence_band(
    fit: StepFit,
    model: ISegmentModel,
    intervals: list[tuple[int, int]] | None = None,
) -> tuple[NDArray, NDArray]:
    """
    Per-sample lower and upper bounds on the reporting scale containing
    every feasible step function with K̂ jumps.

    Between two jump intervals the samples belong to one segment whose value
    lies in the running intersection of that block. Inside the k-th jump
    interval a sample t belongs either to segment k, which then covers
    [right_{k-1}, t], or to segment k+1, which covers [t, left_{k+1} - 1];
    the band there is the hull of both intersections.
    """
    if intervals is None:
        intervals = jump_intervals(fit, model)
    n = model.n
    lower = np.full(n, np.inf)
    upper = np.full(n, -np.inf)
    lefts = [left for left, _ in intervals]
    rights = [0] + [right for _, right in intervals]

    for k, block_start in enumerate(rights):
        # Segment k+1 (1-based) covers [rights[k], t] for t up to the next
        # jump interval's right end.
        block_stop = rights[k + 1] - 1 if k < len(intervals) else n - 1
        gap_end = lefts[k] - 1 if k < len(intervals) else n - 1
        for p, r_lo, low, high in sweep_bounds(model, block_start, block_stop + 1):
            if r_lo != block_start:
                break
            if p == gap_end:
                lower[block_start : gap_end + 1] = low[0]
                upper[block_start : gap_end + 1] = high[0]
            elif p > gap_end:
                lower[p] = min(lower[p], low[0])
                upper[p] = max(upper[p], high[0])

    for k, (left, _) in enumerate(intervals):
        # Segment k+2 (1-based) covers [t, next left - 1].
        stop = lefts[k + 1] - 1 if k + 1 < len(intervals) else n - 1
        column: tuple[int, NDArray, NDArray] | None = None
        for _, r_lo, low, high in sweep_bounds(model, left, stop + 1):
            column = (r_lo, low, high)
        if column is None:
            continue
        r_lo, low, high = column
        right = intervals[k][1]
        for t in range(max(left, r_lo), right):
            lower[t] = min(lower[t], low[t - r_lo])
            upper[t] = max(upper[t], high[t - r_lo])

    return model.to_mean(lower), model.to_mean(upper)


def confidence_region(
    fit: StepFit,
    model: ISegmentModel,
    alpha: float | None = None,
) -> ConfidenceRegion:
    """Jump intervals and band of ``fit`` in one object."""
    intervals = jump_intervals(fit, model)
    lower, upper = confidence_band(fit, model, intervals)
    return ConfidenceRegion(
        k_hat=fit.k_hat,
        jump_intervals=intervals,
        band=list(zip(lower.tolist(), upper.tolist(), strict=True)),
        q=fit.q_used,
        alpha=alpha,
    )

