"""Finite-horizon tools for rough weighted ideal convergence."""
__version__ = "0.1.0"
