"""Semilattice decompositions and membership in Mal'tsev products V o S.

Membership is decided through the semilattice replica alone: a finite
algebra is a semilattice sum of V-algebras iff every replica block lies in
V.  Enumerating other congruences is left to the test oracles.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .algebra import FiniteAlgebra, Verdict, eval, quotient, restrict, satisfies_all
from .congruence import (
    Congruence,
    compose,
    is_congruence,
    join,
    semilattice_replica,
)
from .equations import AxiomSet, Dot, plonka_axioms
from .errors import NotACongruenceError
from .terms import Term, Var, variables_of


@dataclass
class Decomposition:
    replica: Congruence
    quotient: FiniteAlgebra
    blocks: list[FiniteAlgebra]
    # original labels of each block's elements, in local order
    elements: list[tuple[int, ...]]

    def block_of(self, a: int) -> int:
        for i, elems in enumerate(self.elements):
            if a in elems:
                return i
        raise ValueError(f"{a} is not in the carrier")


def decompose(A: FiniteAlgebra, replica: Congruence | None = None) -> Decomposition:
    rho = semilattice_replica(A) if replica is None else replica
    S, _ = quotient(A, rho)
    blocks, elements = [], []
    for block in rho.blocks():
        B, elems = restrict(A, block)
        blocks.append(B)
        elements.append(elems)
    return Decomposition(rho, S, blocks, elements)


def in_product_with_S(A: FiniteAlgebra, V: AxiomSet, budget: int | None = None) -> Verdict:
    """Is ``A`` a semilattice sum of algebras satisfying ``V``?"""
    note = ""
    if V.quasi_identities:
        note = "replica-based"
        warnings.warn(
            "quasi-identities in V: blocks are checked, completeness relies on the replica reduction",
            stacklevel=2,
        )
    dec = decompose(A)
    for i, (B, elems) in enumerate(zip(dec.blocks, dec.elements)):
        v = satisfies_all(B, V, budget)
        if not v.holds:
            v.witness = {x: elems[e] for x, e in v.witness.items()}
            v.block = i
            v.note = note
            return v
    return Verdict(True, note=note)


def in_relative_product(A: FiniteAlgebra, V: AxiomSet, W: AxiomSet, budget: int | None = None) -> Verdict:
    """Membership in the product of V and S relative to W, i.e. in W and in V o S."""
    v = satisfies_all(A, W, budget)
    if not v.holds:
        v.note = "fails W"
        return v
    return in_product_with_S(A, V, budget)


def check_three_permutability(A: FiniteAlgebra, theta: Congruence, replica: Congruence | None = None) -> bool:
    """theta v rho == theta o rho o theta for the replica rho."""
    if not is_congruence(A, theta):
        raise NotACongruenceError(f"{theta} is not a congruence")
    rho = semilattice_replica(A) if replica is None else replica
    return bool(np.array_equal(join(A, theta, rho).matrix(), compose(theta, compose(rho, theta))))


def block_transfer_violation(A: FiniteAlgebra, theta: Congruence, rho: Congruence, t: Term):
    """First (a, b) breaking: if theta relates some element of the rho-block
    of a to some element of the rho-block of b, then b theta t(b, a).
    Returns None when the property holds."""
    x, y = variables_of(t)
    blocks = rho.blocks()
    for ra in blocks:
        for sb in blocks:
            if not any(theta.relates(a1, b1) for a1 in ra for b1 in sb):
                continue
            for a in ra:
                for b in sb:
                    if not theta.relates(b, eval(A, t, {x: b, y: a})):
                        return a, b
    return None


# -- partition operations --------------------------------------------------


@dataclass
class PartitionReport:
    term: Term
    results: list[tuple[str, Verdict]]
    replica: Congruence
    relation: Congruence | None = None
    relation_is_congruence: bool | None = None
    relation_matches_replica: bool | None = None
    lines: list[str] = field(default_factory=list)

    def holds(self, axiom: str) -> bool:
        return all(v.holds for label, v in self.results if label == axiom)

    @property
    def pseudopartition(self) -> bool:
        return all(self.holds(p) for p in ("P1", "P2", "P3", "P4"))

    @property
    def partition(self) -> bool:
        return self.pseudopartition and self.holds("P5")

    @property
    def failed(self) -> list[str]:
        return [p for p in ("P1", "P2", "P3", "P4", "P5") if not self.holds(p)]

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def partition_operation_report(A: FiniteAlgebra, t: Term) -> PartitionReport:
    """Audit ``x . y := t(x, y)`` against (P1)-(P5) in ``A``."""
    ax = plonka_axioms(A.signature, t)
    results = []
    for id in ax.identities:
        base = id.label.split("[")[0]
        results.append((base, satisfies_all(A, [id])))
    rho = semilattice_replica(A)
    report = PartitionReport(t, results, rho)
    lines = []
    for p in ("P1", "P2", "P3", "P4", "P5"):
        fails = [(id, v) for (label, v), id in zip(results, ax.identities) if label == p and not v.holds]
        if not fails:
            lines.append(f"{p}: ok")
            continue
        id, v = fails[0]
        sym = f" [{id.label.split('[')[1]}" if "[" in id.label else ""
        lines.append(f"{p}: FAIL{sym} at {v.witness_text()}")
    if report.pseudopartition:
        dot = Dot(A.signature, t)
        x, y = Var("x"), Var("y")
        xy, yx = dot(x, y), dot(y, x)
        pairs = [
            (a, b)
            for a in range(A.size)
            for b in range(A.size)
            if eval(A, xy, {"x": a, "y": b}) == a and eval(A, yx, {"x": a, "y": b}) == b
        ]
        rel = np.zeros((A.size, A.size), dtype=bool)
        for a, b in pairs:
            rel[a, b] = True
        is_equiv = bool(rel.diagonal().all() and (rel == rel.T).all() and not (compose(rel, rel) & ~rel).any())
        if is_equiv:
            relation = congruence_generated_free(A.size, pairs)
            report.relation = relation
            report.relation_is_congruence = is_congruence(A, relation)
            report.relation_matches_replica = relation == rho
            lines.append(f"relation: {relation}")
        else:
            report.relation_is_congruence = False
            report.relation_matches_replica = False
            lines.append("relation: not an equivalence")
        lines.append(f"relation-congruence: {'yes' if report.relation_is_congruence else 'no'}")
        lines.append(f"relation-equals-replica: {'yes' if report.relation_matches_replica else 'no'}")
    kind = "partition" if report.partition else "pseudopartition" if report.pseudopartition else "neither"
    lines.append(f"operation: {kind}")
    lines.append(f"replica: {rho}")
    lines.append(f"verdict: {'MEMBER' if report.partition else 'NON-MEMBER'}")
    report.lines = lines
    return report


def congruence_generated_free(size: int, pairs) -> Congruence:
    """Equivalence generated by ``pairs`` on ``range(size)``."""
    labels = list(range(size))

    def find(a):
        while labels[a] != a:
            a = labels[a]
        return a

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            labels[max(ra, rb)] = min(ra, rb)
    return Congruence(tuple(find(a) for a in range(size)))


def format_membership(A: FiniteAlgebra, V: AxiomSet, verdict: Verdict, dec: Decomposition | None = None) -> str:
    dec = decompose(A) if dec is None else dec
    lines = [f"replica: {dec.replica}"]
    for i, elems in enumerate(dec.elements):
        lines.append(f"block {i}: {{{','.join(map(str, elems))}}}")
    if not verdict.holds:
        lines.append(
            f"fails: block {verdict.block} formula {verdict.failed_formula} "
            f"[{verdict.formula}] at {verdict.witness_text()}"
            if verdict.block is not None
            else f"fails: formula {verdict.failed_formula} [{verdict.formula}] at {verdict.witness_text()}"
        )
    if verdict.note:
        lines.append(f"note: {verdict.note}")
    lines.append(f"verdict: {'MEMBER' if verdict.holds else 'NON-MEMBER'}")
    return "\n".join(lines) + "\n"
