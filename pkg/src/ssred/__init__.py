"""Exact linear-algebra models of semistable reduction criteria for abelian varieties."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import DomainError, NotSemistableError
from .linalg import Matrix, Poly, charpoly, companion, hnf, minpoly, smith_form, snf
from .cyclotomic import CycloElt, check_quasithm, r_of
from .torsion import TorsionPairData, dual_pair, sslem_equivalence, standard_principal
from .saturation import Lattice, OperatorLattice, saturate
from .scenarios import EXAMPLE_IDS, elliptic_degree_decision, padd_decision, run_example

__all__ = [
    "__version__",
    "DomainError",
    "NotSemistableError",
    "Matrix",
    "Poly",
    "charpoly",
    "companion",
    "hnf",
    "minpoly",
    "smith_form",
    "snf",
    "CycloElt",
    "check_quasithm",
    "r_of",
    "TorsionPairData",
    "dual_pair",
    "sslem_equivalence",
    "standard_principal",
    "Lattice",
    "OperatorLattice",
    "saturate",
    "EXAMPLE_IDS",
    "elliptic_degree_decision",
    "padd_decision",
    "run_example",
]
