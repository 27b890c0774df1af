"""Rational inverse Laplace transforms, microsolutions and E-operator bases."""

__version__ = "0.1.0"
