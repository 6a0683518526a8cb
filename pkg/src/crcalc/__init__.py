"""Pseudohermitian CR invariants of real hypersurfaces in C^2."""

__version__ = "0.1.0"
