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
from scipy.special import expit, logit, xlogy

from smuce.expfam.base import ExpFamily


class Bernoulli(ExpFamily):
    """
    Bernoulli observations with success probability m(θ) = 1 / (1 + e^-θ).
    Also drives the quantile model, where the observations are the
    indicators 1{Yᵢ ≤ v}.
    """

    name = "bernoulli"
    mean_domain = (0.0, 1.0)

    def _psi(self: Self, theta: NDArray) -> NDArray:
        return np.logaddexp(0.0, theta)

    def _mean(self: Self, theta: NDArray) -> NDArray:
        return expit(theta)

    def _variance(self: Self, theta: NDArray) -> NDArray:
        p = expit(theta)
        return p * (1.0 - p)

    def _mean_inverse(self: Self, mu: NDArray) -> NDArray:
        with np.errstate(divide="ignore"):
            return logit(mu)

    def _conjugate(self: Self, x: NDArray) -> NDArray:
        x = np.asarray(x, dtype=float)
        return xlogy(x, x) + xlogy(1.0 - x, 1.0 - x)
