# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""Orchestration of the commands on top of the services."""

from __future__ import annotations

from importlib.metadata import PackageNotFoundError, version
from logging import getLogger
from pathlib import Path
from typing import Self

import numpy as np
from numpy.typing import NDArray

from smuce.adapters.family_registry import FamilyRegistry
from smuce.infrastructure.null_cache import NullTableCache, read_table, write_table
from smuce.infrastructure.series import read_series, write_band_csv
from smuce.interfaces.segment_model import ISegmentModel
from smuce.models.configuration import (
    ChooseQConfigDTO,
    FitConfigDTO,
    NullConfigDTO,
    SimulateConfigDTO,
    SimulationConfigDTO,
)
from smuce.models.document import FitDocument, NullProvenance
from smuce.models.scenario import ScenarioReport
from smuce.services.confidence import confidence_region
from smuce.services.multiscale import PenaltyMode
from smuce.services.nulldist import NullTable, effective_min_scale, quantile, simulate_null, simulation_size
from smuce.services.quantile import QuantileModel
from smuce.services.segdp import ExpFamilyModel, fit_smuce
from smuce.services.tuning import ErrorCurve, SignalPrior, ThresholdChoice, choose_q, error_curve

LOG = getLogger(__name__)


def package_version() -> str:
    try:
        return version("smuce")
    except PackageNotFoundError:
        return "0.0.0"


class NullTableProvider:
    """Loads null tables from files or the cache, simulating missing ones."""

    def __init__(self: Self, config: SimulationConfigDTO) -> None:
        self.__config = config
        self.__cache = NullTableCache(config.cache_dir)

    def get(  # noqa: PLR0913
        self: Self,
        n: int,
        min_scale: float | None = None,
        mode: PenaltyMode = PenaltyMode.SQRT,
        *,
        ma_beta: float | None = None,
        path: Path | None = None,
    ) -> NullTable:
        if path is not None:
            LOG.info("Reading null table from %s", path)
            return read_table(path)
        key = {
            "n": n,
            "reps": self.__config.reps,
            "seed": self.__config.seed,
            "min_scale": effective_min_scale(min_scale, n),
            "mode": mode,
            "ma_beta": ma_beta or None,
        }
        if (table := self.__cache.load(**key)) is not None:
            return table
        table = simulate_null(
            n,
            self.__config.reps,
            self.__config.seed,
            min_scale,
            mode,
            ma_beta=ma_beta,
            threads=self.__config.threads,
            compute_budget=self.__config.compute_budget,
            override_budget=self.__config.override_budget,
        )
        self.__cache.store(table)
        return table


class SmuceEngine:
    """Runs one command per instance."""

    def __init__(self: Self) -> None:
        LOG.debug("Initiate smuce (v%s)", package_version())

    # ==========================================================================
    # Fit
    ##
    def build_model(self: Self, config: FitConfigDTO, data: NDArray, q: float) -> ISegmentModel:
        """Segment model of the configured family; squares the data for gauss-variance."""
        if config.family == "quantile":
            return QuantileModel(data, config.quantile_level, q, config.min_scale, config.mode)  # type: ignore[arg-type]
        family = FamilyRegistry.create(config.family, sigma=config.sigma, ma_beta=config.ma_beta)
        if config.family == "gauss-variance":
            data = np.square(data)
        return ExpFamilyModel(data, family, q, config.min_scale, config.mode)

    def resolve_threshold(self: Self, config: FitConfigDTO, n: int) -> tuple[float, NullTable | None]:
        """q and the null table it was derived from (None for an explicit q)."""
        if config.q is not None:
            return config.q, None
        if config.family != "gauss-mean":
            LOG.warning("Calibrating the %s family with the Gaussian null distribution", config.family)
        n_sim = simulation_size(n)
        min_scale = config.min_scale
        table = NullTableProvider(config.simulation).get(
            n_sim,
            min_scale,
            config.mode,
            ma_beta=config.ma_beta,
            path=config.null_table,
        )
        if config.alpha is not None:
            q = quantile(table, 1.0 - config.alpha)
            LOG.info("Threshold q=%.4f for alpha=%s", q, config.alpha)
            return q, table
        prior = None
        if config.lambda_min is not None:
            prior = SignalPrior(lambda_min=config.lambda_min, delta_min=config.delta_min)
        return choose_q(n, table, prior).q, table

    def fit(self: Self, config: FitConfigDTO) -> FitDocument:
        """Fit the series; the document is written if an output path is set."""
        data = read_series(config.input_path)
        q, table = self.resolve_threshold(config, data.size)
        model = self.build_model(config, data, q)
        fit = fit_smuce(model)
        region = confidence_region(fit, model, config.alpha)
        LOG.info("Estimated %d change-points", fit.k_hat)

        if config.family == "quantile":
            family: dict[str, float | str] = {"family": "quantile", "beta": config.quantile_level}  # type: ignore[dict-item]
        else:
            family = model.family.describe()  # type: ignore[attr-defined]
        document = FitDocument.from_fit(
            fit,
            region,
            family=family,
            version=package_version(),
            input_path=config.input_path,
            seed=None if table is None else table.seed,
            null_table=None if table is None else NullProvenance(n=table.n, reps=table.reps, seed=table.seed),
        )
        if config.output_path is not None:
            config.output_path.write_text(document.to_json(), encoding="utf-8")
            LOG.info("Wrote fit to %s", config.output_path)
        return document

    # ==========================================================================
    # Null tables and thresholds
    ##
    def null(self: Self, config: NullConfigDTO) -> NullTable:
        sim = config.simulation
        family = None
        if config.family is not None:
            family = FamilyRegistry.create(config.family, sigma=config.sigma)
        table = simulate_null(
            config.n,
            sim.reps,
            sim.seed,
            config.min_scale,
            config.mode,
            ma_beta=config.ma_beta,
            family=family,
            theta=config.theta,
            threads=sim.threads,
            compute_budget=sim.compute_budget,
            override_budget=sim.override_budget,
        )
        if config.output_path is not None:
            write_table(table, config.output_path)
        else:
            NullTableCache(sim.cache_dir).store(table)
        return table

    def choose_q(self: Self, config: ChooseQConfigDTO) -> tuple[ThresholdChoice, ErrorCurve]:
        table = NullTableProvider(config.simulation).get(
            simulation_size(config.n),
            config.min_scale,
            config.mode,
            path=config.null_table,
        )
        prior = None
        if config.lambda_min is not None:
            prior = SignalPrior(lambda_min=config.lambda_min, delta_min=config.delta_min)
        curve = error_curve(table, config.n, prior, config.step)
        choice = choose_q(config.n, table, prior, config.step)
        if config.curve_path is not None:
            lines = ["q,alpha,beta,objective"]
            lines.extend(",".join(repr(v) for v in row) for row in curve.rows())
            config.curve_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return choice, curve

    # ==========================================================================
    # Reports
    ##
    def band_csv(self: Self, document_path: Path, output_path: Path, input_path: Path | None = None) -> int:
        document = FitDocument.from_json(Path(document_path).read_text(encoding="utf-8"))
        source = input_path or (Path(document.input_path) if document.input_path else None)
        if source is None:
            raise FileNotFoundError("the fit document names no input series; pass --input")
        return write_band_csv(output_path, document, read_series(source))

    def simulate(self: Self, config: SimulateConfigDTO) -> ScenarioReport:
        from smuce.services.experiments import ScenarioRegistry, run_scenario  # noqa: PLC0415

        scenario = ScenarioRegistry.get(config.scenario)
        if config.reps is not None:
            scenario = scenario.model_copy(update={"reps": config.reps})
        scenario = scenario.model_copy(update={"seed": config.seed})
        report = run_scenario(
            scenario,
            threads=config.threads,
            tables=NullTableProvider(SimulationConfigDTO(cache_dir=config.cache_dir, threads=config.threads)).get,
        )
        if config.output_path is not None:
            config.output_path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
        return report
