# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from smuce.infrastructure.null_cache import write_table
from smuce.services.nulldist import NullTable


@pytest.fixture
def cli_runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def series_file(tmp_path: Path) -> Callable[..., Path]:
    """Write a one column series (with header) and return its path."""

    def write(values: list[float], name: str = "series.csv") -> Path:
        path = tmp_path / name
        path.write_text("value\n" + "".join(f"{v!r}\n" for v in values), encoding="utf-8")
        return path

    return write


@pytest.fixture
def single_sample_table(tmp_path: Path) -> Path:
    """Null table file holding the single sample 0.5."""
    table = NullTable(n=2, reps=1, seed=0, min_scale=0.5, samples=[0.5])
    return write_table(table, tmp_path / "single.txt")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
