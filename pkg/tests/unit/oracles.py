# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""Brute force references for small segmentation problems."""

from itertools import pairwise
from math import e, log, sqrt

import numpy as np
from scipy.special import xlogy

from smuce.services.multiscale import StepFunction


def gaussian_blocks(y: np.ndarray, q: float) -> dict[tuple[int, int], tuple[float, float]]:
    """
    Feasible mean range of every segment [start, end) of standard Gaussian
    data, intersecting |mean - v| √ℓ ≤ q + √(2 log(en/ℓ)) over all
    subintervals.
    """
    n = y.size
    blocks = {}
    for start in range(n):
        for end in range(start + 1, n + 1):
            lower, upper = -np.inf, np.inf
            for i in range(start, end):
                for j in range(i + 1, end + 1):
                    length = j - i
                    radius = q + sqrt(2 * log(e * n / length))
                    if radius < 0:
                        lower, upper = np.inf, -np.inf
                        break
                    mean = float(np.mean(y[i:j]))
                    lower = max(lower, mean - radius / sqrt(length))
                    upper = min(upper, mean + radius / sqrt(length))
            blocks[start, end] = (lower, upper)
    return blocks


def segmentations(n: int) -> list[list[int]]:
    """Every boundary list [0, …] of a series with n samples."""
    return [[0] + [i for i in range(1, n) if mask >> (i - 1) & 1] for mask in range(2 ** (n - 1))]


def exhaustive_fit(y: np.ndarray, q: float) -> tuple[int, float]:
    """Minimal number of jumps and the constrained maximal log-likelihood."""
    n = y.size
    blocks = gaussian_blocks(y, q)
    best: tuple[int, float] | None = None
    for boundaries in segmentations(n):
        spans = list(pairwise([*boundaries, n]))
        if any(blocks[s][0] > blocks[s][1] for s in spans):
            continue
        loglik = 0.0
        for start, end in spans:
            mean = float(np.mean(y[start:end]))
            value = min(max(mean, blocks[start, end][0]), blocks[start, end][1])
            loglik -= (end - start) * (value**2 / 2 - mean * value)
        k = len(boundaries) - 1
        if best is None or k < best[0] or (k == best[0] and loglik > best[1]):
            best = (k, loglik)
    assert best is not None
    return best


def random_step_data(rng: np.random.Generator, n: int, noise: float = 1.0) -> np.ndarray:
    """Step signal with up to three jumps plus Gaussian noise."""
    k = int(rng.integers(0, 4))
    cuts = np.sort(rng.choice(np.arange(1, n), size=min(k, n - 1), replace=False))
    levels = rng.normal(scale=3.0, size=cuts.size + 1)
    return np.repeat(levels, np.diff([0, *cuts, n])) + noise * rng.normal(size=n)


def zero_noise_quantile_data(rng: np.random.Generator) -> tuple[np.ndarray, list[int], list[float]]:
    """Piecewise constant integer levels with segments of at least 15 samples."""
    lengths: list[int] = []
    while sum(lengths) < 30 or (sum(lengths) < 45 and rng.random() < 0.5):
        lengths.append(int(rng.integers(15, 21)))
    levels = [float(rng.integers(-20, 21))]
    while len(levels) < len(lengths):
        level = float(rng.integers(-20, 21))
        if level != levels[-1]:
            levels.append(level)
    return np.repeat(levels, lengths), [int(s) for s in np.cumsum([0, *lengths[:-1]])], levels


def integer_count_stat(y: np.ndarray, step: StepFunction, beta: float) -> float:
    """
    Quantile multiscale statistic enumerating every interval and every
    integer count #{Yᵢ ≤ v} reachable by splitting ties at v.
    """
    n = y.size
    best = -np.inf
    for (start, end), v in zip(step.segments(), step.values_theta, strict=True):
        for i in range(start, end):
            for j in range(i + 1, end + 1):
                window = y[i:j]
                ell = j - i
                local = min(
                    ell * float(xlogy(c / ell, c / ell / beta) + xlogy(1 - c / ell, (1 - c / ell) / (1 - beta)))
                    for c in range(int(np.sum(window < v)), int(np.sum(window <= v)) + 1)
                )
                best = max(best, sqrt(2 * max(local, 0.0)) - sqrt(2 * log(e * n / ell)))
    return best
