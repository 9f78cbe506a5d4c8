"""Finite category theory engine for filter quotients, filter products,
model structures, shape theories and truncated simplicial sets."""
from .kernels import BACKEND
from .fincat import Diagram, FiniteCategory, Functor

__version__ = "0.1.0"

__all__ = ["BACKEND", "Diagram", "FiniteCategory", "Functor", "__version__"]
