# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""CSV input of series and CSV output of bands."""

from __future__ import annotations

import csv
from logging import getLogger
from math import isfinite
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from smuce.exceptions import SeriesFormatError
from smuce.models.document import FitDocument

LOG = getLogger(__name__)

HEADER = "value"
BAND_COLUMNS = ("index", "y", "fit_mean", "band_lower", "band_upper", "jump_interval_flag")


def parse_series(lines: list[str]) -> NDArray:
    """
    Parse a single column of numbers with an optional ``value`` header.

    :raises SeriesFormatError: on a cell that is not a finite number, more
        than one column or fewer than two values
    """
    values: list[float] = []
    for number, row in enumerate(csv.reader(lines), start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 1:
            raise SeriesFormatError(f"expected one column, got {len(row)}", number)
        cell = row[0].strip()
        if number == 1 and cell.lower() == HEADER:
            continue
        try:
            value = float(cell)
        except ValueError:
            raise SeriesFormatError(f"{cell!r} is not a number", number) from None
        if not isfinite(value):
            raise SeriesFormatError(f"{cell!r} is not finite", number)
        values.append(value)
    if len(values) < 2:  # noqa: PLR2004
        raise SeriesFormatError(f"at least two observations are required, got {len(values)}")
    return np.asarray(values, dtype=float)


def read_series(path: Path | str) -> NDArray:
    """
    Read a one column CSV file (LF or CRLF line ends).

    :raises SeriesFormatError: on content that is not UTF-8 text
    """
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SeriesFormatError("not valid UTF-8 text", raw.count(b"\n", 0, exc.start) + 1) from exc
    data = parse_series(text.splitlines())
    LOG.info("Read %d observations from %s", data.size, path)
    return data


def write_band_csv(path: Path | str, document: FitDocument, data: NDArray) -> int:
    """
    Write the plot ready band table, one row per sample. Missing bounds
    and non-finite means are left empty.

    :return: the number of data rows
    """
    if data.size != document.n:
        raise SeriesFormatError(f"the series has {data.size} values but the fit covers n={document.n}")
    means = document.fitted_means()
    flags = document.in_jump_interval()

    def cell(value: float | None) -> str:
        return "" if value is None or not isfinite(value) else repr(float(value))

    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(BAND_COLUMNS)
        for i, band in enumerate(document.band):
            writer.writerow(
                (i, repr(float(data[i])), cell(means[i]), cell(band.lower), cell(band.upper), int(flags[i])),
            )
    return document.n
