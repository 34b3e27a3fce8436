"""Exact mod-p workbench for multiplicative spectral sequences.

Subpackages cover exact F_p linear algebra, graded-commutative monomial
algebras, Tor computations via explicit small resolutions, multiplicative
spectral sequence pages with rule-driven differentials, finitely presented
algebras with rewriting, long exact sequence verification, and a scenario
catalog with a CLI front end.
"""

__version__ = "0.1.0"
