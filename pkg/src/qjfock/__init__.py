"""Exact quasi-Jacobi forms, Hecke operators and Nakajima calculus for Hilbert schemes of an elliptic K3."""

__version__ = "0.1.0"
