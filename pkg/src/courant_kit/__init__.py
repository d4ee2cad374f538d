"""Exact computations for Lie bialgebroids, their Courant doubles and Dirac structures."""

__version__ = "0.1.0"
