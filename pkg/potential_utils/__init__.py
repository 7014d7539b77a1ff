"""Numerical checks for two-weight inequalities of Riesz potentials on radially decreasing cones."""

__version__ = "0.3.0"
