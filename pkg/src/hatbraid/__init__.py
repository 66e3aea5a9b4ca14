"""Braid matrices from rank-one projectors, with their L-algebras, link invariants and coordinate towers."""

__version__ = "0.1.0"
