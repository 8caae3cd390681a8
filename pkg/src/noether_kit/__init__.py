"""Constraint analysis and canonical Noether symmetry checks for singular Lagrangians."""

__version__ = "0.1.0"
