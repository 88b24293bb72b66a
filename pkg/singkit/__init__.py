"""Exact-arithmetic toolkit for singularities of Ising-class n-fold integrals."""

__version__ = "0.4.1"
