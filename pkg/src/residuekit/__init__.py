"""Exact residues, generalized fractions and Koszul complexes over polynomial towers."""

__version__ = "0.1.0"
