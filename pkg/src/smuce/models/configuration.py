# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
Data transfer objects for the commands. These values are passed via CLI or
environment variables.
"""

from __future__ import annotations

from pathlib import Path
from typing import Self

from pydantic import BaseModel, field_validator, model_validator

from smuce.services.multiscale import PenaltyMode
from smuce.services.nulldist import DEFAULT_COMPUTE_BUDGET, DEFAULT_REPS

#: Families accepted by ``smuce fit``; ``quantile`` is the data space model
FIT_FAMILIES = ("gauss-mean", "gauss-variance", "poisson", "bernoulli", "quantile")


class SimulationConfigDTO(BaseModel):
    """How null tables are simulated and where they are cached."""

    reps: int = DEFAULT_REPS
    seed: int = 0
    threads: int | None = None
    cache_dir: Path | None = None
    compute_budget: float = DEFAULT_COMPUTE_BUDGET
    override_budget: bool = False

    @field_validator("reps")
    @classmethod
    def validate_reps(cls, value: int) -> int:
        """Validate reps is positive."""
        if value < 1:
            raise ValueError("reps must be greater than 0")
        return value

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, value: int) -> int:
        """Validate the seed fits into an unsigned 64 bit integer."""
        if not 0 <= value < 2**64:
            raise ValueError("seed must be an unsigned 64 bit integer")
        return value

    @field_validator("threads")
    @classmethod
    def validate_threads(cls, value: int | None) -> int | None:
        if value is not None and value < 1:
            raise ValueError("threads must be greater than 0")
        return value

    @field_validator("compute_budget")
    @classmethod
    def validate_budget(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("compute_budget must be greater than 0")
        return value


class FitConfigDTO(BaseModel):
    """
    Everything ``smuce fit`` needs. Exactly one of ``alpha``, ``q`` and
    ``auto_q`` selects the threshold.
    """

    input_path: Path
    output_path: Path | None = None
    family: str = "gauss-mean"
    sigma: float | None = None
    quantile_level: float | None = None
    ma_beta: float | None = None

    alpha: float | None = None
    q: float | None = None
    auto_q: bool = False
    null_table: Path | None = None

    min_scale: float | None = None
    mode: PenaltyMode = PenaltyMode.SQRT
    lambda_min: float | None = None
    delta_min: float | None = None

    simulation: SimulationConfigDTO = SimulationConfigDTO()

    @field_validator("family")
    @classmethod
    def validate_family(cls, value: str) -> str:
        """Validate the family name."""
        if value not in FIT_FAMILIES:
            raise ValueError(f"family must be one of: {', '.join(FIT_FAMILIES)}")
        return value

    @field_validator("alpha")
    @classmethod
    def validate_alpha(cls, value: float | None) -> float | None:
        if value is not None and not 0 < value < 1:
            raise ValueError("alpha must be between 0 and 1 (exclusive)")
        return value

    @field_validator("min_scale")
    @classmethod
    def validate_min_scale(cls, value: float | None) -> float | None:
        if value is not None and not 0 < value <= 1:
            raise ValueError("min_scale must lie in (0, 1]")
        return value

    @field_validator("sigma")
    @classmethod
    def validate_sigma(cls, value: float | None) -> float | None:
        if value is not None and value <= 0:
            raise ValueError("sigma must be greater than 0")
        return value

    @field_validator("quantile_level")
    @classmethod
    def validate_quantile_level(cls, value: float | None) -> float | None:
        if value is not None and not 0 < value < 1:
            raise ValueError("quantile_level must be between 0 and 1 (exclusive)")
        return value

    @model_validator(mode="after")
    def validate_threshold(self: Self) -> Self:
        if sum((self.alpha is not None, self.q is not None, self.auto_q)) != 1:
            raise ValueError("exactly one of alpha, q and auto_q must be given")
        if (self.lambda_min is None) != (self.delta_min is None):
            raise ValueError("lambda_min and delta_min must be given together")
        if self.lambda_min is not None and not self.auto_q:
            raise ValueError("lambda_min and delta_min are only used with auto_q")
        return self

    @model_validator(mode="after")
    def validate_family_params(self: Self) -> Self:
        if self.sigma is not None and self.family != "gauss-mean":
            raise ValueError("sigma is only valid for the gauss-mean family")
        if self.ma_beta is not None and self.family != "gauss-mean":
            raise ValueError("ma_beta is only valid for the gauss-mean family")
        if (self.quantile_level is None) == (self.family == "quantile"):
            raise ValueError("quantile_level is required for, and only valid with, the quantile family")
        if self.family == "gauss-mean" and self.sigma is None:
            raise ValueError("sigma is required for the gauss-mean family")
        return self


class NullConfigDTO(BaseModel):
    """Configuration of ``smuce null``."""

    n: int
    output_path: Path | None = None
    min_scale: float | None = None
    mode: PenaltyMode = PenaltyMode.SQRT
    ma_beta: float | None = None
    family: str | None = None
    theta: float | None = None
    sigma: float | None = None

    simulation: SimulationConfigDTO = SimulationConfigDTO()

    @field_validator("n")
    @classmethod
    def validate_n(cls, value: int) -> int:
        if value < 2:  # noqa: PLR2004
            raise ValueError("n must be at least 2")
        return value

    @model_validator(mode="after")
    def validate_exact(self: Self) -> Self:
        if (self.family is None) != (self.theta is None):
            raise ValueError("family and theta must be given together")
        if self.family is not None and self.family not in FIT_FAMILIES[:-1]:
            raise ValueError(f"family must be one of: {', '.join(FIT_FAMILIES[:-1])}")
        if self.sigma is not None and self.family != "gauss-mean":
            raise ValueError("sigma requires the gauss-mean family")
        if self.ma_beta is not None and self.family not in {None, "gauss-mean"}:
            raise ValueError("ma_beta is only valid for Gaussian noise")
        return self


class ChooseQConfigDTO(BaseModel):
    """Configuration of ``smuce choose-q``."""

    n: int
    null_table: Path | None = None
    curve_path: Path | None = None
    lambda_min: float | None = None
    delta_min: float | None = None
    min_scale: float | None = None
    mode: PenaltyMode = PenaltyMode.SQRT
    step: float = 0.01

    simulation: SimulationConfigDTO = SimulationConfigDTO()

    @field_validator("n")
    @classmethod
    def validate_n(cls, value: int) -> int:
        if value < 2:  # noqa: PLR2004
            raise ValueError("n must be at least 2")
        return value

    @field_validator("step")
    @classmethod
    def validate_step(cls, value: float) -> float:
        if not 0 < value <= 0.01:  # noqa: PLR2004
            raise ValueError("step must lie in (0, 0.01]")
        return value

    @model_validator(mode="after")
    def validate_prior(self: Self) -> Self:
        if (self.lambda_min is None) != (self.delta_min is None):
            raise ValueError("lambda_min and delta_min must be given together")
        return self


class SimulateConfigDTO(BaseModel):
    """Configuration of ``smuce simulate``."""

    scenario: str
    output_path: Path | None = None
    reps: int | None = None
    seed: int = 0
    threads: int | None = None
    cache_dir: Path | None = None

    @field_validator("reps")
    @classmethod
    def validate_reps(cls, value: int | None) -> int | None:
        if value is not None and value < 1:
            raise ValueError("reps must be greater than 0")
        return value
