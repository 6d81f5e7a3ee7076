"""Exact separation power of equivariant networks over finite permutation groups."""

__version__ = "0.1.0"
