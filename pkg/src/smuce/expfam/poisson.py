# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

from __future__ import annotations

from typing import Self

import numpy as np
from numpy.typing import NDArray
from scipy.special import xlogy

from smuce.expfam.base import ExpFamily


class Poisson(ExpFamily):
    """Poisson counts with intensity μ = e^θ."""

    name = "poisson"
    mean_domain = (0.0, np.inf)

    def _psi(self: Self, theta: NDArray) -> NDArray:
        return np.exp(theta)

    def _mean(self: Self, theta: NDArray) -> NDArray:
        return np.exp(theta)

    def _variance(self: Self, theta: NDArray) -> NDArray:
        return np.exp(theta)

    def _mean_inverse(self: Self, mu: NDArray) -> NDArray:
        with np.errstate(divide="ignore"):
            return np.log(mu)

    def _conjugate(self: Self, x: NDArray) -> NDArray:
        # x log x - x, with the limit 0 at x = 0
        return xlogy(x, x) - np.asarray(x, dtype=float)
