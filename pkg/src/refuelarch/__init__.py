"""Cooperative vs. non-cooperative multi-target on-orbit refueling trade studies."""

__version__ = "0.1.0"
