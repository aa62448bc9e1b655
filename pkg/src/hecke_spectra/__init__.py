"""Trace formulas for Hecke operators: Petersson and Eichler-Selberg sides,
windowed averages, variance identities, and spectral-measure diagnostics."""

__version__ = "0.1.0"
