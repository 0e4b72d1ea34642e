"""Exact computational toolkit for convex and intersection-theoretic volume."""

__version__ = "0.1.0"
