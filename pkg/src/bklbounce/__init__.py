"""Computer-algebra engine for frame-data graded Lie algebras, BKL filtrations,
Maurer-Cartan bounce solutions, and spectral sequences of filtered complexes."""

__version__ = "0.1.0"
