"""Exact computations with semigroup rings of matrices over finite fields."""

__version__ = "0.1.0"
