"""Exact toolkit for special quadratic birational transformations of
projective space: invariant calculus, genus bounds, classification tables
and verification of explicit examples."""

__version__ = "0.1.0"
