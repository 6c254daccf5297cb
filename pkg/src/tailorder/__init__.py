"""Tail orders of copulas: Archimedean, elliptical and extreme-value families."""

__version__ = "0.1.0"
