# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""Multiscale change-point inference for exponential family step signals."""

from smuce.services.confidence import ConfidenceRegion, confidence_region
from smuce.services.nulldist import NullTable, quantile, simulate_null, survival
from smuce.services.quantile import QuantileModel
from smuce.services.segdp import ExpFamilyModel, StepFit, fit_penalized, fit_smuce, smuce

__all__ = [
    "ConfidenceRegion",
    "ExpFamilyModel",
    "NullTable",
    "QuantileModel",
    "StepFit",
    "confidence_region",
    "fit_penalized",
    "fit_smuce",
    "quantile",
    "simulate_null",
    "smuce",
    "survival",
]
