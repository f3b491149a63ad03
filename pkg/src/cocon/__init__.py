"""Kernel for a dependent type theory mixing LF-style HOAS with recursive
computation, mediated by contextual box types."""

__version__ = "0.1.0"
