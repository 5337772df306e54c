# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""One-parameter exponential families."""

from smuce.expfam.base import ExpFamily, LocalStatInput, ValueInterval
from smuce.expfam.bernoulli import Bernoulli
from smuce.expfam.gaussian import GaussMean, GaussVariance, ma1_local_scale
from smuce.expfam.poisson import Poisson

__all__ = [
    "Bernoulli",
    "ExpFamily",
    "GaussMean",
    "GaussVariance",
    "LocalStatInput",
    "Poisson",
    "ValueInterval",
    "ma1_local_scale",
]
