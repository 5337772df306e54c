# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
Monte Carlo null distribution of the multiscale statistic.

Every replicate evaluates the statistic of the constant candidate θ₀ on
data drawn under θ₀, by default n standard normal observations, in which
case the sample is

    max over intervals of |Σ Zᵢ| / √ℓ - √(2 log(en/ℓ)).

Replicate r draws from its own stream PCG64(SeedSequence([seed, r])), so
tables do not depend on the batching or the number of threads. Uniforms
are built from 53 random bits as (k + ½) / 2⁵³ and transformed by inverse
distribution functions.
"""

from __future__ import annotations

from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger
from math import ceil
from os import cpu_count
from typing import Self

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import stats
from scipy.special import ndtri

from smuce.exceptions import ComputeBudgetError, DomainError, NullTableError
from smuce.expfam.base import ExpFamily
from smuce.expfam.gaussian import GaussMean
from smuce.services.multiscale import PenaltyMode, calibrate, min_length

LOG = getLogger(__name__)

#: Default number of Monte Carlo replicates
DEFAULT_REPS: int = 5000
#: Largest n simulated when a table is derived from the data size
MAX_SIMULATION_N: int = 3000
#: Default bound on n² · reps
DEFAULT_COMPUTE_BUDGET: float = 1e11
#: Upper bound on the number of matrix entries per batch
BATCH_ENTRIES: int = 4_000_000

_RESOLUTION = 2.0**53


class NullTable(BaseModel):
    """Sorted Monte Carlo samples of the null statistic and their provenance."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=2)
    reps: int = Field(..., ge=1)
    seed: int = Field(..., ge=0)
    min_scale: float = Field(..., gt=0, le=1)
    mode: PenaltyMode = PenaltyMode.SQRT
    samples: list[float]
    ma_beta: float | None = None
    family: str | None = None
    theta: float | None = None

    @model_validator(mode="after")
    def validate_samples(self: Self) -> Self:
        if len(self.samples) != self.reps:
            raise ValueError(f"expected {self.reps} samples, got {len(self.samples)}")
        if any(b < a for a, b in zip(self.samples, self.samples[1:], strict=False)):
            raise ValueError("samples must be sorted ascending")
        return self

    def as_array(self: Self) -> NDArray:
        return np.asarray(self.samples, dtype=float)


def simulation_size(n: int) -> int:
    """Sample size of the table used for data of size n."""
    return min(n, MAX_SIMULATION_N)


def effective_min_scale(min_scale: float | None, n: int) -> float:
    """Smallest scale recorded for a table; scales below 1/n all mean 1/n."""
    return 1.0 / n if min_scale is None else max(min_scale, 1.0 / n)


def check_budget(n: int, reps: int, budget: float = DEFAULT_COMPUTE_BUDGET, *, override: bool = False) -> None:
    """
    :raises ComputeBudgetError: if n² · reps exceeds ``budget`` and no
        override is given
    """
    work = float(n) ** 2 * reps
    if work <= budget:
        return
    if not override:
        raise ComputeBudgetError(
            f"simulating n={n} with reps={reps} needs {work:.3g} interval evaluations, "
            f"above the compute budget of {budget:.3g}",
        )
    LOG.warning("Simulating %.3g interval evaluations above the compute budget of %.3g", work, budget)


def replicate_uniforms(seed: int, rep: int, size: int, *, stream: int | None = None) -> NDArray:
    """
    Uniforms in (0, 1) of replicate ``rep``. A nonzero ``stream`` selects
    draws independent of the null tables with the same seed.
    """
    entropy = [seed, rep] if stream is None else [seed, rep, stream]
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
    bits = rng.integers(0, 2**53, size=size, dtype=np.int64)
    return (bits.astype(float) + 0.5) / _RESOLUTION


def _draw(
    family: ExpFamily,
    theta: float,
    uniforms: NDArray,
    ma_beta: float,
    *,
    exact: bool,
) -> NDArray:
    """Sufficient statistics of one batch of replicates (rows)."""
    if not exact:
        noise = ndtri(uniforms)
        if ma_beta:
            return noise[:, 1:] + ma_beta * noise[:, :-1]
        return noise
    mean = float(family.mean(theta))
    name = family.name
    if name == "gauss-mean":
        noise = ndtri(uniforms)
        if ma_beta:
            noise = noise[:, 1:] + ma_beta * noise[:, :-1]
        return mean + family.sigma * noise  # type: ignore[attr-defined]
    if name == "gauss-variance":
        return np.square(stats.norm(scale=np.sqrt(mean)).ppf(uniforms))
    if name == "poisson":
        return stats.poisson(mean).ppf(uniforms)
    if name == "bernoulli":
        return stats.bernoulli(mean).ppf(uniforms)
    raise DomainError(f"no exact null simulation for family {name}")


def _batch_stats(
    data: NDArray,
    family: ExpFamily,
    theta: float,
    shortest: int,
    mode: PenaltyMode,
) -> NDArray:
    """Multiscale statistic of the constant candidate θ for every row."""
    reps, n = data.shape
    cumsum = np.concatenate((np.zeros((reps, 1)), np.cumsum(data, axis=1)), axis=1)
    best = np.full(reps, -np.inf)
    for ell in range(shortest, n + 1):
        means = (cumsum[:, ell:] - cumsum[:, :-ell]) / ell
        scores = calibrate(family.local_stats(means, ell, theta), ell, n, mode)
        np.maximum(best, scores.max(axis=1), out=best)
    return best


def simulate_null(  # noqa: PLR0913
    n: int,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    min_scale: float | None = None,
    mode: PenaltyMode = PenaltyMode.SQRT,
    *,
    ma_beta: float | None = None,
    family: ExpFamily | None = None,
    theta: float | None = None,
    threads: int | None = None,
    compute_budget: float = DEFAULT_COMPUTE_BUDGET,
    override_budget: bool = False,
) -> NullTable:
    """
    Simulate the null statistic on n observations.

    Without ``family`` the observations are iid N(0, 1) (or an MA(1)
    process with coefficient ``ma_beta``) and the statistic is evaluated
    for the Gaussian mean family at θ₀ = 0. With ``family`` and ``theta``
    the observations are drawn exactly from that family at θ.

    :raises ComputeBudgetError: see :func:`check_budget`
    """
    if n < 2:
        raise DomainError(f"n={n} must be at least 2")
    if reps < 1:
        raise DomainError(f"reps={reps} must be positive")
    if seed < 0:
        raise DomainError(f"seed={seed} must be nonnegative")
    if (family is None) != (theta is None):
        raise DomainError("family and theta must be given together")
    check_budget(n, reps, compute_budget, override=override_budget)

    mode = PenaltyMode(mode)
    shortest = min_length(min_scale, n)
    beta = float(ma_beta or 0.0)
    exact = family is not None
    if family is None:
        stat_family: ExpFamily = GaussMean(1.0, ma_beta=beta)
        theta0 = 0.0
    else:
        if family.name == "gauss-mean":
            beta = beta or family.ma_beta  # type: ignore[attr-defined]
            family = GaussMean(family.sigma, ma_beta=beta)  # type: ignore[attr-defined]
        elif beta:
            raise DomainError("MA(1) noise is only supported for the gauss-mean family")
        stat_family = family
        theta0 = float(family.check_theta(theta))
    width = n + 1 if beta else n

    batch = max(1, BATCH_ENTRIES // (n + 1))
    starts = list(range(0, reps, batch))

    def run(first: int) -> NDArray:
        last = min(first + batch, reps)
        uniforms = np.stack([replicate_uniforms(seed, r, width) for r in range(first, last)])
        data = _draw(stat_family, theta0, uniforms, beta, exact=exact)
        LOG.debug("Simulating replicates %d..%d", first, last - 1)
        return _batch_stats(data, stat_family, theta0, shortest, mode)

    workers = threads or cpu_count() or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        samples = np.concatenate(list(pool.map(run, starts)))

    LOG.info("Simulated %d null replicates for n=%d (seed=%d)", reps, n, seed)
    return NullTable(
        n=n,
        reps=reps,
        seed=seed,
        min_scale=effective_min_scale(min_scale, n),
        mode=mode,
        samples=np.sort(samples).tolist(),
        ma_beta=beta or None,
        family=family.name if family is not None else None,
        theta=theta0 if family is not None else None,
    )


def quantile(table: NullTable, level: float) -> float:
    """
    Empirical quantile, the order statistic with 1-based index
    ⌈level · reps⌉.
    """
    if not table.samples:
        raise NullTableError("empty null table")
    if not 0.0 < level < 1.0:
        raise DomainError(f"level={level!r} must lie in (0, 1)")
    index = max(ceil(round(level * table.reps, 9)), 1)
    return table.samples[index - 1]


def survival(table: NullTable, q: float) -> float:
    """Fraction of samples ≥ q."""
    if not table.samples:
        raise NullTableError("empty null table")
    return (table.reps - bisect_left(table.samples, q)) / table.reps
