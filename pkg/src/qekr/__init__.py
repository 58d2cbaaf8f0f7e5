"""Exact tools for intersecting families of subspaces over finite fields."""
__version__ = "0.1.0"
