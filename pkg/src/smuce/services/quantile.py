# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
Quantile regression through the Bernoulli family.

For a candidate level v on an interval the indicators 1{Yᵢ ≤ v} are
Bernoulli(β) under the hypothesis that v is the β-quantile, so the local
statistic of an interval with ℓ samples is ℓ · J(count/ℓ, logit β). The
constraint therefore only restricts the count, to an integer range
[c_lo(ℓ), c_hi(ℓ)] around β ℓ, and a level v passes on a window iff some
split of the ties at v yields an admissible count:

    y_(c_lo) ≤ v ≤ y_(c_hi + 1)     (y_(0) = -∞, y_(ℓ+1) = +∞)

Segment values live in data space; segments are scored by the check loss
Σ ρ_β(yᵢ - v), the Bernoulli likelihood being flat in v between data
points.
"""

from __future__ import annotations

from bisect import bisect_right
from collections.abc import Iterator
from logging import getLogger
from math import ceil, floor
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import logit

from smuce.exceptions import DomainError, InfeasibleThresholdError
from smuce.expfam.bernoulli import Bernoulli
from smuce.interfaces.segment_model import ISegmentModel
from smuce.services.multiscale import PenaltyMode, StepFunction, calibrate, min_length
from smuce.services.segdp import threshold_table

LOG = getLogger(__name__)

#: Number of bisection steps on the frequency scale
FREQUENCY_STEPS: int = 64


class WindowTree:
    """
    Fenwick trees over the data ranks holding the count and the sum of the
    samples inserted so far. Insertion, prefix queries and order statistics
    are O(log n).
    """

    def __init__(self: Self, size: int) -> None:
        self._size = size
        self._count = [0] * (size + 1)
        self._sum = [0.0] * (size + 1)
        self._top = 1 << (size.bit_length() - 1) if size else 0

    def add(self: Self, rank: int, value: float) -> None:
        i = rank + 1
        while i <= self._size:
            self._count[i] += 1
            self._sum[i] += value
            i += i & -i

    def prefix(self: Self, stop: int) -> tuple[int, float]:
        """Count and sum of the inserted samples with rank below ``stop``."""
        count, total = 0, 0.0
        while stop > 0:
            count += self._count[stop]
            total += self._sum[stop]
            stop &= stop - 1
        return count, total

    def select(self: Self, k: int) -> int:
        """Rank of the k-th smallest inserted sample (1-based ``k``)."""
        pos, step = 0, self._top
        while step:
            nxt = pos + step
            if nxt <= self._size and self._count[nxt] < k:
                pos = nxt
                k -= self._count[nxt]
            step >>= 1
        return pos


class QuantileModel(ISegmentModel):
    """Change-point problem for the β-quantile of real observations."""

    def __init__(
        self: Self,
        data: ArrayLike,
        beta: float,
        q: float,
        min_scale: float | None = None,
        mode: PenaltyMode = PenaltyMode.SQRT,
    ) -> None:
        y = np.asarray(data, dtype=float)
        if y.ndim != 1 or y.size < 1:
            raise DomainError("data must be a non-empty vector")
        if not np.all(np.isfinite(y)):
            raise DomainError("data must be finite")
        if not 0.0 < beta < 1.0:
            raise DomainError(f"quantile level beta={beta!r} must lie in (0, 1)")
        self.data = y
        self.beta = float(beta)
        self.n = y.size
        self.q = float(q)
        self.min_scale = min_scale
        self.mode = PenaltyMode(mode)
        self._family = Bernoulli()
        self._theta = float(logit(self.beta))
        self._levels = threshold_table(self.q, self.n, self.mode, min_length(min_scale, self.n))
        self._count_lo, self._count_hi = self._count_ranges()
        order = np.argsort(y, kind="stable")
        self._sorted = y[order].tolist()
        self._rank = np.empty(self.n, dtype=int)
        self._rank[order] = np.arange(self.n)
        self._cache: tuple[int, int, NDArray] | None = None

    def __repr__(self: Self) -> str:
        return f"QuantileModel(n={self.n}, beta={self.beta}, q={self.q}, mode={self.mode.value})"

    # ==========================================================================
    # Count constraint
    ##
    def _divergence(self: Self, freq: NDArray) -> NDArray:
        return self._family._divergence(freq, self._theta)  # noqa: SLF001

    def _count_ranges(self: Self) -> tuple[NDArray, NDArray]:
        """Admissible count ranges per interval length (index 0 unused)."""
        ell = np.arange(self.n + 1, dtype=float)
        ell[0] = 1.0
        level = self._levels
        count_lo = np.ones(self.n + 1, dtype=int)
        count_hi = np.zeros(self.n + 1, dtype=int)

        unconstrained = np.isposinf(level)
        count_lo[unconstrained] = 0
        count_hi[unconstrained] = ell[unconstrained].astype(int)

        active = np.isfinite(level)
        active[0] = False
        if np.any(active):
            c = level[active]
            w_lo = self._frequency_bound(c, 0.0)
            w_hi = self._frequency_bound(c, 1.0)
            m = ell[active]
            lo = np.ceil(m * w_lo).astype(int)
            hi = np.floor(m * w_hi).astype(int)
            # The bisection returns inner points; admit neighbours meeting
            # the constraint exactly.
            step_lo = (lo >= 1) & (self._divergence(np.maximum(lo - 1, 0) / m) <= c)
            step_hi = (hi < m) & (self._divergence(np.minimum(hi + 1, m) / m) <= c)
            count_lo[active] = lo - step_lo
            count_hi[active] = hi + step_hi
        return count_lo, count_hi

    def _frequency_bound(self: Self, level: NDArray, end: float) -> NDArray:
        """Frequency w between β and ``end`` farthest from β with J(w) ≤ level."""
        result = np.full(level.shape, end)
        outside = self._divergence(np.full(level.shape, end)) > level
        inner = np.full(level.shape, self.beta)
        outer = np.full(level.shape, end)
        for _ in range(FREQUENCY_STEPS):
            middle = 0.5 * (inner + outer)
            inside = self._divergence(middle) <= level
            inner = np.where(inside, middle, inner)
            outer = np.where(inside, outer, middle)
        result[outside] = inner[outside]
        return result

    def check_threshold(self: Self) -> None:
        if self._count_lo[1] > self._count_hi[1]:
            best = float(np.min(self._divergence(np.array([0.0, 1.0]))))
            raise InfeasibleThresholdError(self.q, float(calibrate(best, 1, self.n, self.mode)))

    def count_range(self: Self, length: int) -> tuple[int, int]:
        """Admissible counts #{Yᵢ ≤ v} of an interval with ``length`` samples."""
        return int(self._count_lo[length]), int(self._count_hi[length])

    # ==========================================================================
    # Windows
    ##
    def _suffixes(self: Self, r_lo: int, p: int) -> Iterator[tuple[int, WindowTree]]:
        """Windows y[r..p] for r = p, p-1, …, r_lo, as a growing rank tree."""
        tree = WindowTree(self.n)
        for r in range(p, r_lo - 1, -1):
            tree.add(int(self._rank[r]), float(self.data[r]))
            yield r, tree

    def _order_stat(self: Self, tree: WindowTree, k: int) -> float:
        return self._sorted[tree.select(k)]

    def interval_bounds(self: Self, r_lo: int, p: int) -> tuple[NDArray, NDArray]:
        size = p + 1 - r_lo
        lower = np.empty(size)
        upper = np.empty(size)
        vstar = np.empty(size)
        for r, tree in self._suffixes(r_lo, p):
            length = p + 1 - r
            lo, hi = self._count_lo[length], self._count_hi[length]
            i = r - r_lo
            if lo > hi:
                lower[i], upper[i] = np.inf, -np.inf
            else:
                lower[i] = self._order_stat(tree, lo) if lo >= 1 else -np.inf
                upper[i] = self._order_stat(tree, hi + 1) if hi < length else np.inf
            vstar[i] = self._order_stat(tree, max(ceil(self.beta * length), 1))
        self._cache = (r_lo, p, vstar)
        return lower, upper

    def _lower_quantiles(self: Self, r_lo: int, p: int) -> NDArray:
        if self._cache is not None and self._cache[1] == p and self._cache[0] <= r_lo:
            return self._cache[2][r_lo - self._cache[0] :]
        vstar = np.empty(p + 1 - r_lo)
        for r, tree in self._suffixes(r_lo, p):
            vstar[r - r_lo] = self._order_stat(tree, max(ceil(self.beta * (p + 1 - r)), 1))
        return vstar

    def segment_values(self: Self, r_lo: int, p: int, lower: NDArray, upper: NDArray) -> NDArray:
        """
        The lower sample β-quantile clamped into [lower, upper]; its count
        is the admissible one nearest β ℓ.
        """
        return np.clip(self._lower_quantiles(r_lo, p), lower, upper)

    def segment_costs(self: Self, r_lo: int, p: int, values: NDArray) -> NDArray:
        values = np.broadcast_to(np.asarray(values, dtype=float), (p + 1 - r_lo,))
        beta = self.beta
        costs = np.empty(p + 1 - r_lo)
        total = 0.0
        for r, tree in self._suffixes(r_lo, p):
            total += float(self.data[r])
            v = float(values[r - r_lo])
            count, below = tree.prefix(bisect_right(self._sorted, v))
            above = total - below
            length = p + 1 - r
            costs[r - r_lo] = beta * (above - v * (length - count)) + (1.0 - beta) * (v * count - below)
        return costs

    def to_mean(self: Self, values: NDArray) -> NDArray:
        return np.asarray(values, dtype=float)

    # ==========================================================================
    # Statistic
    ##
    def multiscale_stat(self: Self, step: StepFunction) -> float:
        """
        Multiscale statistic with tie aware counts: on every interval the
        count is the integer in [#{Yᵢ < v}, #{Yᵢ ≤ v}] with the smallest
        local statistic, the same split of ties the fit admits.
        """
        if step.n != self.n:
            raise DomainError(f"data of length {self.n} does not match a step function on n={step.n}")
        shortest = min_length(self.min_scale, self.n)
        best = -np.inf
        for (start, end), v in zip(step.segments(), step.values_theta, strict=True):
            y = self.data[start:end]
            below = np.concatenate(([0], np.cumsum(y < v)))
            at_most = np.concatenate(([0], np.cumsum(y <= v)))
            for ell in range(shortest, end - start + 1):
                lo = below[ell:] - below[:-ell]
                hi = at_most[ell:] - at_most[:-ell]
                below_beta = np.clip(floor(self.beta * ell), lo, hi)
                above_beta = np.clip(ceil(self.beta * ell), lo, hi)
                stats = ell * np.minimum(self._divergence(below_beta / ell), self._divergence(above_beta / ell))
                best = max(best, float(np.max(calibrate(stats, ell, self.n, self.mode))))
        return best

    def reversed(self: Self) -> Self:
        return type(self)(self.data[::-1].copy(), self.beta, self.q, self.min_scale, self.mode)

    def sufficient_gamma(self: Self) -> float:
        """Bound on the check loss of any segmentation with values in the data range."""
        spread = float(np.max(self.data) - np.min(self.data))
        return self.n * spread * max(self.beta, 1.0 - self.beta) + 1.0


def admissible_levels(model: QuantileModel, start: int, stop: int) -> tuple[float, float]:
    """
    Levels v passing the constraint of the single window y[start..stop]
    (inclusive), as closed interval; ``lower > upper`` if none does.
    """
    window = sorted(model.data[start : stop + 1].tolist())
    length = len(window)
    lo, hi = model.count_range(length)
    if lo > hi:
        return np.inf, -np.inf
    lower = window[lo - 1] if lo >= 1 else -np.inf
    upper = window[hi] if hi < length else np.inf
    return lower, upper

