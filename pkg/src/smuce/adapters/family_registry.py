# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

"""
Exponential Family Registry

This module provides a centralized registry mapping family names as used on
the command line and in documents to their :class:`ExpFamily`
implementations. Families are registered lazily, so the implementing module
is imported only when a family is first requested:

    FamilyRegistry.register_lazy(
        "poisson",
        "smuce.expfam.poisson",
        "Poisson",
    )

    family = FamilyRegistry.create("gauss-mean", sigma=0.2)
"""

from importlib import import_module
from logging import getLogger
from typing import Any, ClassVar, Self

from smuce.exceptions import DomainError
from smuce.expfam.base import ExpFamily

LOG = getLogger(__name__)


class _LazyFamily:
    """Defers importing the family module until the family is needed."""

    def __init__(self: Self, module_path: str, class_name: str) -> None:
        self.module_path = module_path
        self.class_name = class_name
        self._family: type[ExpFamily] | None = None

    def load(self: Self) -> type[ExpFamily]:
        if self._family is None:
            module = import_module(self.module_path)
            self._family = getattr(module, self.class_name)
        return self._family


class FamilyRegistry:
    """
    Registry of the supported exponential families.

    New families can be registered without touching the solver or the CLI.
    """

    _families: ClassVar[dict[str, _LazyFamily]] = {}

    @classmethod
    def register_lazy(cls: type[Self], name: str, module_path: str, class_name: str) -> None:
        """
        Register a family class (lazy loading).

        :param name: The name of the family
        :type name: str
        :param module_path: The module path containing the family
        :type module_path: str
        :param class_name: The name of the implementing class
        :type class_name: str
        """
        LOG.debug("Lazy registering family: %s", name)
        cls._families[name] = _LazyFamily(module_path, class_name)

    @classmethod
    def get_family(cls: type[Self], name: str) -> type[ExpFamily]:
        """
        Get the class implementing a family.

        :param name: The name of the family
        :type name: str
        :return: The family class
        :rtype: type[ExpFamily]
        :raises DomainError: If the family is not registered
        """
        if name not in cls._families:
            raise DomainError(
                f"Unsupported family: {name}. Available families: {', '.join(cls._families.keys())}",
            )
        return cls._families[name].load()

    @classmethod
    def create(cls: type[Self], name: str, **params: Any) -> ExpFamily:  # noqa: ANN401
        """
        Instantiate a family with its parameters (e.g. ``sigma`` and
        ``ma_beta`` for "gauss-mean"). Parameters set to ``None`` are
        dropped.
        """
        family = cls.get_family(name)
        return family(**{k: v for k, v in params.items() if v is not None})

    @classmethod
    def get_supported_families(cls: type[Self]) -> list[str]:
        """
        Get a list of all supported families.

        :return: List of family names
        :rtype: list[str]
        """
        return list(cls._families.keys())


FamilyRegistry.register_lazy("gauss-mean", "smuce.expfam.gaussian", "GaussMean")
FamilyRegistry.register_lazy("gauss-variance", "smuce.expfam.gaussian", "GaussVariance")
FamilyRegistry.register_lazy("poisson", "smuce.expfam.poisson", "Poisson")
FamilyRegistry.register_lazy("bernoulli", "smuce.expfam.bernoulli", "Bernoulli")
