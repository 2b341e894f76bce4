"""Relative homological invariants of persistence modules over finite grids."""

__version__ = "0.1.0"
