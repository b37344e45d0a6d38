"""Skew-commutator calculus for the G2 quantum Borel algebra and its coideal lattice."""

__version__ = "0.1.0"
