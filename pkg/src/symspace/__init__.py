"""Rearrangement-invariant norms, the Hardy-type operator T, Macdonald-kernel
Sobolev checks and torus Cwikel operators, computed on exact step functions."""

__version__ = "0.1.0"
