"""Exact and numerical tools for algebraic solutions of the Lamé equation."""

__version__ = "0.1.0"
