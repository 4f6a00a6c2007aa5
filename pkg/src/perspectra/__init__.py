"""Perspectivity of abelian groups, torsion-free modules and finite rings.

Constructive common complements for isomorphic direct summands, exhaustive
oracles to check them against, and the ring-side corner-unit criterion.
"""

__version__ = "0.1.0"
