"""Exact-arithmetic kernel for derived zero loci in projective space."""

__version__ = "0.1.0"
