"""Numerical toolkit for f_{nu,mu}(t), the inverse Laplace transform of s^-mu exp(-s^nu)."""

from .errors import CancellationError, DomainError, EfrosError, NonConvergenceError, QuadratureError
from .kernel import KernelEval, KernelParams, Method, eval_auto, f, kernel_scaled
from .quad import DEFAULT_SPEC, QuadratureSpec, QuadResult

__all__ = [
    "CancellationError",
    "DEFAULT_SPEC",
    "DomainError",
    "EfrosError",
    "KernelEval",
    "KernelParams",
    "Method",
    "NonConvergenceError",
    "QuadResult",
    "QuadratureError",
    "QuadratureSpec",
    "eval_auto",
    "f",
    "kernel_scaled",
]

__version__ = "0.1.0"
