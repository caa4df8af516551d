"""Elastic time-series distances with a tunable cost exponent."""

__version__ = "0.1.0"
