"""Exact computations for differential symmetry breaking operators D_{lambda,nu}^{N,+-N}."""

__version__ = "0.1.0"
