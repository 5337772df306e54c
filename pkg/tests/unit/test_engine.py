# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""Unit tests for the command orchestration."""

import json
from collections.abc import Callable
from pathlib import Path

import pytest

from smuce.core import engine
from smuce.core.engine import NullTableProvider, SmuceEngine, package_version
from smuce.exceptions import InfeasibleThresholdError
from smuce.infrastructure.null_cache import NullTableCache, read_table
from smuce.models.configuration import (
    ChooseQConfigDTO,
    FitConfigDTO,
    NullConfigDTO,
    SimulateConfigDTO,
    SimulationConfigDTO,
)
from smuce.models.document import FitDocument
from smuce.models.scenario import Scenario
from smuce.services.experiments import ScenarioRegistry

STEP = [0.0] * 10 + [5.0] * 10

SeriesFile = Callable[..., Path]


class TestFit:
    def test_explicit_q(self, series_file: SeriesFile, tmp_path: Path) -> None:
        """Test a fit with a given threshold is written as JSON."""
        output = tmp_path / "fit.json"
        config = FitConfigDTO(input_path=series_file(STEP), output_path=output, q=1.0, sigma=1.0)
        document = SmuceEngine().fit(config)

        assert document.k_hat == 1
        assert document.null_table is None
        assert document.seed is None
        assert document.input_path == str(config.input_path)
        assert FitDocument.from_json(output.read_text(encoding="utf-8")) == document

    def test_alpha_with_table_file(self, series_file: SeriesFile, single_sample_table: Path) -> None:
        """Test α is turned into the quantile of the given table."""
        config = FitConfigDTO(input_path=series_file(STEP), alpha=0.1, sigma=1.0, null_table=single_sample_table)
        document = SmuceEngine().fit(config)
        assert document.q == 0.5
        assert document.alpha == 0.1
        assert document.null_table is not None
        assert (document.null_table.n, document.null_table.reps) == (2, 1)

    def test_auto_q_with_table_file(self, series_file: SeriesFile, single_sample_table: Path) -> None:
        """Test the automatic choice on a one sample table."""
        config = FitConfigDTO(input_path=series_file(STEP), auto_q=True, sigma=1.0, null_table=single_sample_table)
        assert SmuceEngine().fit(config).q == 0.5

    def test_families(self, series_file: SeriesFile) -> None:
        """Test family descriptions in the document."""
        path = series_file([1.0, 2.0, 3.0, 2.0] * 5)
        poisson = SmuceEngine().fit(FitConfigDTO(input_path=path, q=1.0, family="poisson"))
        assert poisson.family == {"family": "poisson"}
        quantile = SmuceEngine().fit(FitConfigDTO(input_path=path, q=1.0, family="quantile", quantile_level=0.5))
        assert quantile.family == {"family": "quantile", "beta": 0.5}
        gauss = SmuceEngine().fit(FitConfigDTO(input_path=path, q=1.0, sigma=0.5))
        assert gauss.family == {"family": "gauss-mean", "sigma": 0.5}

    def test_variance_squares_the_data(self, series_file: SeriesFile) -> None:
        """Test gauss-variance fits variances of the raw observations."""
        document = SmuceEngine().fit(
            FitConfigDTO(input_path=series_file([2.0, -2.0] * 10), q=1.0, family="gauss-variance"),
        )
        assert document.k_hat == 0
        assert document.segments[0].value_mean == pytest.approx(4.0)

    def test_infeasible_threshold(self, series_file: SeriesFile) -> None:
        """Test thresholds below the attainable minimum."""
        with pytest.raises(InfeasibleThresholdError):
            SmuceEngine().fit(FitConfigDTO(input_path=series_file(STEP), q=-5.0, sigma=1.0))


class TestNullTables:
    def test_provider_caches(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test a simulated table is stored and reused, also for scales below 1/n."""
        provider = NullTableProvider(SimulationConfigDTO(reps=20, seed=2, cache_dir=tmp_path, threads=1))
        first = provider.get(8)
        assert NullTableCache(tmp_path).path_for(n=8, reps=20, seed=2, min_scale=1 / 8, mode="sqrt").is_file()

        def fail(*args: object, **kwargs: object) -> None:
            raise AssertionError("simulated twice")

        monkeypatch.setattr(engine, "simulate_null", fail)
        assert provider.get(8) == first
        assert provider.get(8, min_scale=0.05) == first

    def test_null_to_file(self, tmp_path: Path) -> None:
        """Test `null` writes the requested file."""
        output = tmp_path / "table.txt"
        config = NullConfigDTO(n=5, output_path=output, simulation=SimulationConfigDTO(reps=10, threads=1))
        table = SmuceEngine().null(config)
        assert read_table(output) == table

    def test_null_to_cache(self, tmp_path: Path) -> None:
        """Test `null` without output fills the cache."""
        config = NullConfigDTO(
            n=5,
            family="poisson",
            theta=0.0,
            simulation=SimulationConfigDTO(reps=10, cache_dir=tmp_path),
        )
        table = SmuceEngine().null(config)
        assert table.family == "poisson"
        assert len(list(tmp_path.iterdir())) == 1

    def test_choose_q_curve(self, tmp_path: Path, single_sample_table: Path) -> None:
        """Test the error curve CSV."""
        curve_path = tmp_path / "curve.csv"
        choice, curve = SmuceEngine().choose_q(
            ChooseQConfigDTO(n=100, null_table=single_sample_table, curve_path=curve_path),
        )
        assert choice.q == 0.5
        lines = curve_path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "q,alpha,beta,objective"
        assert len(lines) == len(curve.q) + 1


class TestReports:
    def test_band_csv(self, series_file: SeriesFile, tmp_path: Path) -> None:
        """Test the band table is built from the document's input path."""
        fit_path = tmp_path / "fit.json"
        SmuceEngine().fit(FitConfigDTO(input_path=series_file(STEP), output_path=fit_path, q=1.0, sigma=1.0))
        assert SmuceEngine().band_csv(fit_path, tmp_path / "band.csv") == 20
        assert len((tmp_path / "band.csv").read_text(encoding="utf-8").splitlines()) == 21

    def test_simulate(self, tmp_path: Path) -> None:
        """Test running a registered scenario."""
        ScenarioRegistry.register(
            Scenario(
                name="engine-test",
                family="gauss-mean",
                n=30,
                change_points=[15],
                values=[0.0, 4.0],
                sigma=0.1,
                q=1.0,
                reps=50,
            ),
        )
        output = tmp_path / "report.json"
        report = SmuceEngine().simulate(SimulateConfigDTO(scenario="engine-test", reps=3, output_path=output, threads=1))
        assert report.reps == 3
        assert json.loads(output.read_text(encoding="utf-8"))["name"] == "engine-test"


def test_package_version() -> None:
    """Test the version is a non-empty string."""
    assert package_version()
