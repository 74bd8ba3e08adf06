"""Poincare profiles and separation of round tree graphs."""

__version__ = "0.1.0"
