"""Weak slice conditions on planar slit domains: geometry, metrics and experiments."""

__version__ = "0.1.0"
