"""Semilattice sums, Mal'tsev products and Plonka sums of finite algebras."""

from .algebra import FiniteAlgebra, Verdict, parse_ualg, satisfies_all
from .congruence import Congruence, all_congruences, congruence_generated, semilattice_replica
from .equations import AxiomSet, Identity, QuasiIdentity, parse_axioms, prolong_set
from .maltsev import decompose, in_product_with_S, partition_operation_report
from .terms import Signature, parse_term

__version__ = "0.1.0"

__all__ = [
    "AxiomSet",
    "Congruence",
    "FiniteAlgebra",
    "Identity",
    "QuasiIdentity",
    "Signature",
    "Verdict",
    "all_congruences",
    "congruence_generated",
    "decompose",
    "in_product_with_S",
    "parse_axioms",
    "parse_term",
    "parse_ualg",
    "partition_operation_report",
    "prolong_set",
    "satisfies_all",
    "semilattice_replica",
]
