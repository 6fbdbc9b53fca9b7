"""Maximal partial sums of Dirichlet characters.

Computes and lower-bounds the constant Delta(N) of the L2 maximal inequality
for characters mod N, and reproduces the subgroup/rearrangement construction
that forces Delta(p) to grow along a positive proportion of primes.
"""
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
