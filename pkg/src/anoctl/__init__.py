"""Numerical and combinatorial toolkit for matrix-group boundary geometry:
Cartan projections and flag maps, divergence and limit sets of finitely
generated subgroups, membership and bad-set tests in quadric
compactifications, dynamical certification of properly discontinuous
domains, and Satake-type boundary-orbit combinatorics."""

__version__ = "0.1.0"
