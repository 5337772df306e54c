# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
Seeded simulation studies.

Replicate r of a scenario draws its observations from the stream
(seed, r, SCENARIO_STREAM), so reports do not depend on the order in which
replicates finish. Competing methods are not part of the reports.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger
from os import cpu_count
from time import perf_counter
from typing import ClassVar, NamedTuple, Self

import numpy as np
from numpy.typing import NDArray
from scipy import stats
from scipy.special import ndtri

from smuce.adapters.family_registry import FamilyRegistry
from smuce.exceptions import DomainError
from smuce.models.scenario import CoverageTriple, Scenario, ScenarioReport
from smuce.services.confidence import confidence_region
from smuce.services.multiscale import PenaltyMode
from smuce.services.nulldist import NullTable, quantile, replicate_uniforms, simulate_null, simulation_size
from smuce.services.segdp import ExpFamilyModel, fit_smuce
from smuce.services.tuning import choose_q

LOG = getLogger(__name__)

SCENARIO_STREAM: int = 1

TableSource = Callable[..., NullTable]

#: Change-points and segment means of the array CGH like test signal
TABLE1_CHANGE_POINTS = (138, 225, 242, 299, 308, 332)
TABLE1_VALUES = (-0.18, 0.08, 1.07, -0.53, 0.16, -0.69, -0.16)
TABLE1_N = 497


class ReplicateResult(NamedTuple):
    k_hat: int
    squared_error: float
    absolute_error: float
    covered: bool


# ==============================================================================
# Data
##
def draw(scenario: Scenario, rep: int) -> NDArray:
    """Observations of replicate ``rep`` (Y, not Y², for gauss-variance)."""
    width = scenario.n + 1 if scenario.noise_ma_beta else scenario.n
    uniforms = replicate_uniforms(scenario.seed, rep, width, stream=SCENARIO_STREAM)
    truth = scenario.truth()
    match scenario.family:
        case "gauss-mean":
            noise = ndtri(uniforms)
            if scenario.noise_ma_beta:
                noise = noise[1:] + scenario.noise_ma_beta * noise[:-1]
            return truth + scenario.trend() + scenario.sigma * noise
        case "gauss-variance":
            return np.sqrt(truth) * ndtri(uniforms)
        case "poisson":
            return stats.poisson.ppf(uniforms, truth)
        case "bernoulli":
            return stats.bernoulli.ppf(uniforms, truth)
    raise DomainError(f"unsupported scenario family {scenario.family}")


def _default_tables(n: int, min_scale: float | None, mode: PenaltyMode, *, ma_beta: float | None = None) -> NullTable:
    return simulate_null(n, min_scale=min_scale, mode=mode, ma_beta=ma_beta)


def scenario_threshold(scenario: Scenario, tables: TableSource | None = None) -> float:
    """q of the scenario, from the null table of the fit's noise model."""
    if scenario.q is not None:
        return scenario.q
    source = tables or _default_tables
    table = source(simulation_size(scenario.n), scenario.min_scale, scenario.mode, ma_beta=scenario.fit_ma_beta)
    if scenario.level is not None:
        return quantile(table, scenario.level)
    return choose_q(scenario.n, table).q


# ==============================================================================
# Replicates
##
def run_replicate(scenario: Scenario, rep: int, q: float) -> ReplicateResult:
    y = draw(scenario, rep)
    if scenario.family == "gauss-mean":
        family = FamilyRegistry.create("gauss-mean", sigma=scenario.sigma, ma_beta=scenario.fit_ma_beta)
    else:
        family = FamilyRegistry.create(scenario.family)
    data = np.square(y) if scenario.family == "gauss-variance" else y
    model = ExpFamilyModel(data, family, q, scenario.min_scale, scenario.mode)
    fit = fit_smuce(model)
    truth = scenario.truth()
    error = fit.fitted_means() - truth

    covered = fit.k_hat == scenario.k
    if covered:
        region = confidence_region(fit, model)
        covered = all(
            left <= point <= right
            for point, (left, right) in zip(scenario.change_points, region.jump_intervals, strict=True)
        )
        lower, upper = region.band_arrays()
        slack = 1e-9 * np.maximum(1.0, np.abs(truth))
        covered = covered and bool(np.all((lower - slack <= truth) & (truth <= upper + slack)))

    return ReplicateResult(
        k_hat=fit.k_hat,
        squared_error=float(np.mean(np.square(error))),
        absolute_error=float(np.mean(np.abs(error))),
        covered=covered,
    )


def _difference_bin(diff: int) -> str:
    if diff <= -3:  # noqa: PLR2004
        return "<=-3"
    if diff >= 3:  # noqa: PLR2004
        return ">=+3"
    return f"{diff:+d}" if diff else "0"


DIFFERENCE_BINS = ("<=-3", "-2", "-1", "0", "+1", "+2", ">=+3")


def summarize(scenario: Scenario, q: float, results: list[ReplicateResult]) -> ScenarioReport:
    reps = len(results)
    bins = Counter(_difference_bin(r.k_hat - scenario.k) for r in results)
    counts = Counter(r.k_hat for r in results)
    correct = sum(r.k_hat == scenario.k for r in results)
    covered = sum(r.covered for r in results)
    return ScenarioReport(
        name=scenario.name,
        family=scenario.family,
        n=scenario.n,
        k=scenario.k,
        reps=reps,
        seed=scenario.seed,
        q=q,
        level=scenario.level,
        stand_in=scenario.stand_in,
        k_difference={b: bins[b] / reps for b in DIFFERENCE_BINS},
        k_hat={k: counts[k] / reps for k in sorted(counts)},
        mise=float(np.mean([r.squared_error for r in results])),
        miae=float(np.mean([r.absolute_error for r in results])),
        detection_rate=sum(r.k_hat >= 1 for r in results) / reps,
        at_least_k=sum(r.k_hat >= scenario.k for r in results) / reps,
        coverage=CoverageTriple(
            simultaneous=covered / reps,
            correct_k=correct / reps,
            conditional=covered / correct if correct else None,
        ),
    )


def run_scenario(
    scenario: Scenario,
    *,
    threads: int | None = None,
    tables: TableSource | None = None,
) -> ScenarioReport:
    """Run all replicates of ``scenario`` in parallel and summarise them."""
    if scenario.stand_in:
        LOG.warning("Scenario %s uses a stand-in signal", scenario.name)
    q = scenario_threshold(scenario, tables)
    LOG.info("Running scenario %s with q=%.4f and %d replicates", scenario.name, q, scenario.reps)
    started = perf_counter()

    def run(rep: int) -> ReplicateResult:
        return run_replicate(scenario, rep, q)

    with ThreadPoolExecutor(max_workers=threads or cpu_count() or 1) as pool:
        results = list(pool.map(run, range(scenario.reps)))
    LOG.debug("Scenario %s took %.1f s", scenario.name, perf_counter() - started)
    return summarize(scenario, q, results)


# ==============================================================================
# Registry
##
class ScenarioRegistry:
    """Built-in scenarios by name."""

    _scenarios: ClassVar[dict[str, Scenario]] = {}

    @classmethod
    def register(cls: type[Self], scenario: Scenario) -> None:
        LOG.debug("Registering scenario: %s", scenario.name)
        cls._scenarios[scenario.name] = scenario

    @classmethod
    def get(cls: type[Self], name: str) -> Scenario:
        """
        :raises DomainError: If the scenario is not registered
        """
        if name not in cls._scenarios:
            raise DomainError(f"Unknown scenario: {name}. Available scenarios: {', '.join(cls._scenarios)}")
        return cls._scenarios[name]

    @classmethod
    def names(cls: type[Self]) -> list[str]:
        return list(cls._scenarios)


def _table1(name: str, sigma: float, *, trend_a: float = 0.0, level: float = 0.55, **extra: float | None) -> Scenario:
    return Scenario(
        name=name,
        description=f"array CGH like signal, sigma={sigma}, trend a={trend_a}",
        family="gauss-mean",
        n=TABLE1_N,
        change_points=list(TABLE1_CHANGE_POINTS),
        values=list(TABLE1_VALUES),
        sigma=sigma,
        trend_a=trend_a,
        trend_b=0.1 if trend_a else 0.0,
        level=level,
        **extra,
    )


def _equidistant(n: int, k: int) -> list[int]:
    return [round(n * (i + 1) / (k + 1)) for i in range(k)]


def _alternating(k: int, low: float, high: float) -> list[float]:
    return [low if i % 2 == 0 else high for i in range(k + 1)]


for _scenario in (
    _table1("table1-gauss", 0.1),
    _table1("table1-gauss-s0.2", 0.2),
    _table1("table1-gauss-s0.2-long", 0.2, trend_a=0.01),
    _table1("table1-gauss-s0.2-short", 0.2, trend_a=0.025),
    _table1("table1-gauss-s0.3", 0.3),
    _table1("table1-gauss-s0.3-level0.4", 0.3, level=0.4),
    _table1("ma1-dependent-0.1", 0.2, level=0.75, noise_ma_beta=0.1, fit_ma_beta=0.1),
    _table1("ma1-dependent-0.1-independent-fit", 0.2, level=0.75, noise_ma_beta=0.1),
    _table1("ma1-dependent-0.3", 0.2, level=0.75, noise_ma_beta=0.3, fit_ma_beta=0.3),
    _table1("ma1-dependent-0.3-independent-fit", 0.2, level=0.75, noise_ma_beta=0.3),
    Scenario(
        name="null-gauss",
        description="no change-point, overestimation control",
        family="gauss-mean",
        n=500,
        values=[0.0],
        level=0.9,
        reps=2000,
    ),
    Scenario(
        name="bump-detection",
        description="bump of height 1 on 30% of the samples",
        family="gauss-mean",
        n=500,
        change_points=[175, 325],
        values=[0.0, 1.0, 0.0],
        level=0.9,
    ),
    Scenario(
        name="two-jump",
        description="two jumps of size 2, smallest segment a quarter of the samples",
        family="gauss-mean",
        n=500,
        change_points=[125, 375],
        values=[0.0, 2.0, 0.0],
        level=0.9,
    ),
    *(
        Scenario(
            name=f"variance-k{k}",
            description=f"{k} equidistant variance changes",
            family="gauss-variance",
            n=1000,
            change_points=_equidistant(1000, k),
            values=[s**2 for s in _alternating(k, 1.0, high)],
            level=0.9,
            reps=1000,
        )
        for k, high in ((0, 1.0), (1, 2.0), (4, 2.0), (9, 2.5), (19, 3.5))
    ),
    Scenario(
        name="poisson-lowcount",
        description="low count signal with a spike",
        family="poisson",
        n=1000,
        change_points=[150, 300, 420, 460, 600, 640, 800],
        values=[0.5, 2.0, 0.3, 8.0, 1.0, 15.0, 0.5, 3.0],
        auto_q=True,
        stand_in=True,
    ),
    *(
        Scenario(
            name=f"coverage-quad-{family}-{n}-{level}",
            description=f"coverage signal for the {family} family",
            family=family,
            n=n,
            change_points=[int(n * f) for f in (0.2, 0.45, 0.55, 0.8)],
            values=values,
            level=level,
            stand_in=True,
        )
        for family, values in (
            ("gauss-mean", [0.0, 1.5, 0.0, 2.0, 0.5]),
            ("gauss-variance", [1.0, 2.5, 1.0, 4.0, 1.5]),
            ("poisson", [2.0, 6.0, 2.0, 10.0, 4.0]),
            ("bernoulli", [0.2, 0.6, 0.2, 0.8, 0.4]),
        )
        for n in (1000, 1500, 2000)
        for level in (0.8, 0.9, 0.95)
    ),
):
    ScenarioRegistry.register(_scenario)
