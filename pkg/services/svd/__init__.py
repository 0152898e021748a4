"""Annealing-based singular value decomposition.

Numerical core shared by the command line, the HTTP API and the worker.
"""

from services.svd.errors import ConvergenceError, DecompositionError, InputError

__all__ = ["ConvergenceError", "DecompositionError", "InputError"]
