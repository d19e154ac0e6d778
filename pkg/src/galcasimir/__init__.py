"""Casimir invariants of the Galilean Lie algebra gal(n).

Exact construction of the coadjoint-invariant generators, their symbolic and
sampled verification, the symmetrized central elements of U(gal(n)), and a
float reduction of dual vectors to a transversal normal form.
"""

__version__ = "0.1.0"

from .kernels import BACKEND
from .polyring import MultiPoly, VarTable
from .galilean import BasisLabel, DualVector, GroupElement, basis, coadjoint, structure_constants
from .invariants import InvariantSet, generator_set, minor_sum, q1, q2

__all__ = [
    "BACKEND",
    "BasisLabel",
    "DualVector",
    "GroupElement",
    "InvariantSet",
    "MultiPoly",
    "VarTable",
    "basis",
    "coadjoint",
    "generator_set",
    "minor_sum",
    "q1",
    "q2",
    "structure_constants",
]
