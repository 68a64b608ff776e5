"""Derivative and gauge checks."""

from cocircular.checks.oracles import DerivativeChecker, central_difference, relative_error

__all__ = ["DerivativeChecker", "central_difference", "relative_error"]
