# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""Custom exceptions for the smuce change-point library."""


class SmuceError(Exception):
    """Base class of all errors raised by the smuce package."""


class DomainError(SmuceError, ValueError):
    """
    A natural parameter lies outside the natural parameter space or a mean
    value lies outside the closed mean domain of the family.
    """


class MeanBoundaryError(DomainError):
    """
    The inverse mean map was requested at the boundary of the mean domain,
    e.g. a Poisson mean of zero or a Bernoulli mean of zero or one.

    Callers that can deal with one-sided intervals should request the
    extended inverse (``allow_boundary=True``) which maps boundary means to
    the corresponding infinite natural parameter instead.
    """


class NegativeThresholdError(SmuceError, ValueError):
    """
    A feasible interval was requested for a negative threshold. This
    happens when the scale-calibrated constraint cannot be met on an
    interval of the given length.
    """


class InfeasibleThresholdError(SmuceError):
    """
    The threshold q is below the smallest statistic any step function can
    attain, so not even n singleton segments satisfy the constraint.

    Attributes:
        q (float): The requested threshold.
        floor (float): The minimal attainable multiscale statistic.

    Example:

    .. code-block:: python

        try:
            fit = fit_smuce(model)
        except InfeasibleThresholdError as exc:
            LOG.error("q=%s is below the floor %s", exc.q, exc.floor)
    """

    def __init__(self, q: float, floor: float) -> None:
        self.q = q
        self.floor = floor
        super().__init__(
            f"No step function satisfies the multiscale constraint for q={q!r}; "
            f"the minimal attainable statistic is {floor!r}.",
        )


class NoFeasibleFitError(SmuceError):
    """No segmentation of the data satisfies the multiscale constraint."""


class ComputeBudgetError(SmuceError):
    """
    The requested Monte Carlo simulation exceeds the configured compute
    budget of interval evaluations (n² · reps).
    """


class SeriesFormatError(SmuceError, ValueError):
    """
    The input series could not be parsed.

    Attributes:
        line (int | None): 1-based line number of the offending cell.
    """

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class NullTableError(SmuceError, ValueError):
    """A null table is empty, malformed or does not match its request."""
