"""Determinantal point processes for dimer and tiling models."""

__version__ = "0.1.0"
