"""Spectral limits of graph sequences: degree measures, distances,
quasirandom certificates and rank-k degree splits."""

__version__ = "0.1.0"
