"""Cube complexes with hierarchically hyperbolic bookkeeping.

The package realizes finite windows of CAT(0) cube complexes (explicit or
periodic), builds their contact and factored contact graphs, extracts a
hierarchical structure with checked axioms, classifies automorphisms, and
computes boundary and simplicial-boundary data.  See the README for the CLI.
"""

__version__ = "0.1.0"
