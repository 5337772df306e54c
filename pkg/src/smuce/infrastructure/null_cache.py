# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
Plain text storage of null tables.

A table file starts with the header line

    smuce-null v1,n=<n>,reps=<r>,seed=<s>,min_scale=<c>,mode=<m>

optionally followed by ``,ma_beta=<β>`` or ``,family=<name>,theta=<θ>``,
and holds one sample per line in ascending order, written with ``repr`` so
that reading a file back reproduces every float exactly.
"""

from __future__ import annotations

import os
from logging import getLogger
from pathlib import Path
from typing import Any, Self

from pydantic import ValidationError

from smuce.exceptions import NullTableError
from smuce.services.multiscale import PenaltyMode
from smuce.services.nulldist import NullTable

LOG = getLogger(__name__)

MAGIC = "smuce-null v1"
#: Environment variable naming the default cache directory
CACHE_DIR_ENV = "SMUCE_CACHE_DIR"


def header(table: NullTable) -> str:
    fields = [
        MAGIC,
        f"n={table.n}",
        f"reps={table.reps}",
        f"seed={table.seed}",
        f"min_scale={table.min_scale!r}",
        f"mode={table.mode.value}",
    ]
    if table.ma_beta is not None:
        fields.append(f"ma_beta={table.ma_beta!r}")
    if table.family is not None:
        fields.extend((f"family={table.family}", f"theta={table.theta!r}"))
    return ",".join(fields)


def _parse_header(line: str) -> dict[str, Any]:
    magic, _, rest = line.partition(",")
    if magic != MAGIC:
        raise NullTableError(f"not a null table (header {line[:40]!r})")
    fields: dict[str, Any] = {}
    for item in rest.split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise NullTableError(f"malformed header field {item!r}")
        fields[key] = value
    return fields


def dumps(table: NullTable) -> str:
    return "\n".join([header(table), *(repr(float(s)) for s in table.samples)]) + "\n"


def loads(text: str) -> NullTable:
    """
    Parse the content of a table file.

    :raises NullTableError: on a missing header, a non-numeric sample or
        metadata that does not match the samples
    """
    lines = text.splitlines()
    if not lines:
        raise NullTableError("empty null table file")
    fields = _parse_header(lines[0].strip())
    samples: list[float] = []
    for number, line in enumerate(lines[1:], start=2):
        if not (line := line.strip()):
            continue
        try:
            samples.append(float(line))
        except ValueError as exc:
            raise NullTableError(f"line {number}: {line!r} is not a number") from exc
    try:
        return NullTable(samples=samples, **fields)
    except ValidationError as exc:
        raise NullTableError(f"invalid null table: {exc}") from exc


def write_table(table: NullTable, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(table), encoding="ascii")
    LOG.debug("Wrote null table with %d samples to %s", table.reps, path)
    return path


def read_table(path: Path | str) -> NullTable:
    try:
        text = Path(path).read_text(encoding="ascii")
    except UnicodeDecodeError as exc:
        raise NullTableError(f"{path} is not a null table") from exc
    return loads(text)


def table_name(  # noqa: PLR0913
    n: int,
    reps: int,
    seed: int,
    min_scale: float,
    mode: PenaltyMode | str,
    *,
    ma_beta: float | None = None,
    family: str | None = None,
    theta: float | None = None,
) -> str:
    name = f"null-n{n}-r{reps}-s{seed}-c{min_scale!r}-{PenaltyMode(mode).value}"
    if ma_beta is not None:
        name += f"-ma{ma_beta!r}"
    if family is not None:
        name += f"-{family}{theta!r}"
    return name + ".txt"


class NullTableCache:
    """Directory of null tables keyed by their metadata."""

    def __init__(self: Self, directory: Path | str | None = None) -> None:
        if directory is None:
            directory = os.environ.get(CACHE_DIR_ENV) or Path.home() / ".cache" / "smuce"
        self.directory = Path(directory)

    def path_for(self: Self, **key: Any) -> Path:  # noqa: ANN401
        return self.directory / table_name(**key)

    def load(self: Self, **key: Any) -> NullTable | None:  # noqa: ANN401
        """
        The cached table for ``key`` or None.

        :raises NullTableError: if the file exists but its metadata differs
            from the key
        """
        path = self.path_for(**key)
        if not path.is_file():
            LOG.info("No cached null table at %s", path)
            return None
        table = read_table(path)
        expected = NullTable.model_fields.keys() - {"samples"}
        for field in expected & key.keys():
            stored = getattr(table, field)
            wanted = key[field]
            if field == "mode":
                wanted = PenaltyMode(wanted)
            if stored != wanted:
                raise NullTableError(f"{path}: {field}={stored!r} does not match {wanted!r}")
        LOG.info("Using cached null table %s", path)
        return table

    def store(self: Self, table: NullTable) -> Path:
        return write_table(
            table,
            self.path_for(
                n=table.n,
                reps=table.reps,
                seed=table.seed,
                min_scale=table.min_scale,
                mode=table.mode,
                ma_beta=table.ma_beta,
                family=table.family,
                theta=table.theta,
            ),
        )
