"""Concrete particle models and their kernels."""
