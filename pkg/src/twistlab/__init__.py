"""Numerical experiments on commutator maps and twist dynamics of compact groups."""

__version__ = "0.1.0"
