"""Scripted checks over the shipped examples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fixtures
from .algebra import FiniteAlgebra, eval, quotient, satisfies_all, satisfies_identity
from .congruence import congruence_generated, semilattice_replica
from .equations import commutative_sum_quasi_identity, parse_identity
from .maltsev import in_product_with_S, partition_operation_report
from .search import GROUPOID, band_census, enumerate_lz_sums, find_separating_model, steiner_search
from .terms import parse_term


@dataclass
class Check:
    key: str
    claim: str
    passed: bool
    observed: str

    def line(self) -> str:
        return f"({self.key}) {'PASS' if self.passed else 'FAIL'}  {self.claim}  [{self.observed}]"


@dataclass
class SuiteReport:
    checks: list[Check]
    notes: str = ""

    @property
    def failures(self) -> int:
        return sum(not c.passed for c in self.checks)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def text(self) -> str:
        lines = [c.line() for c in self.checks]
        lines.append(f"{len(self.checks) - self.failures}/{len(self.checks)} passed")
        text = "\n".join(lines) + "\n"
        if self.notes:
            text += "\nSteiner census (reported only):\n" + self.notes
        return text


# 2-element chain with 0 on top, so block {0,1} sits above block {2,3}
TOP_FIRST_CHAIN = FiniteAlgebra(GROUPOID, 2, {"mul": np.array([[0, 1], [1, 1]])}, "chain2-top-first")
# a member of LZ o S over that chain where x(yx) and (xy)x differ
SEPARATING_TABLE = np.array(
    [
        [0, 0, 2, 2],
        [1, 1, 2, 2],
        [3, 2, 2, 2],
        [2, 2, 3, 3],
    ]
)
FLEXIBLE = "(mul x (mul y x)) = (mul (mul x y) x)"


def _exss_checks(A: FiniteAlgebra) -> list[Check]:
    out = []
    rho = semilattice_replica(A)
    out.append(Check("a", "exss replica = {0,1|2,3|4,5|6}", str(rho) == "{0,1|2,3|4,5|6}", str(rho)))
    theta = congruence_generated(A, [(2, 4)])
    out.append(Check("b", "Cg(2,4) = {0,2,4|1|3|5|6}", str(theta) == "{0,2,4|1|3|5|6}", str(theta)))
    sl = fixtures.axioms("semilattice")
    member = in_product_with_S(A, sl).holds
    B, block_map = quotient(A, theta)
    q = satisfies_all(B, [commutative_sum_quasi_identity(GROUPOID)])
    if q.holds:
        seen = "B satisfies the quasi-identity"
    else:
        reps = {v: block_map.index(q.witness[v]) for v in ("x", "y", "z")}
        seen = "B fails at classes of " + " ".join(f"{v}={reps[v]}" for v in ("x", "y", "z"))
    b_member = in_product_with_S(B, sl).holds
    ok = member and not q.holds and not b_member
    out.append(Check("c", "exss in SoS; exss/Cg(2,4) fails the quasi-identity and is not in SoS", ok, seen))
    return out


def _bichain_checks() -> list[Check]:
    lat = fixtures.axioms("lattice")
    verdicts = {k: in_product_with_S(fixtures.algebra(f"bichain_{k}"), lat).holds for k in ("3m", "3j", "3n")}
    ok = verdicts["3n"] and not verdicts["3m"] and not verdicts["3j"]
    seen = " ".join(f"{k}:{'member' if v else 'non-member'}" for k, v in verdicts.items())
    out = [Check("d", "3n in LoS, 3m and 3j are not", ok, seen)]
    t = parse_term("(join x (meet x y))", fixtures.BISEMILATTICE)
    r = partition_operation_report(fixtures.algebra("bichain_3n"), t)
    failed = [p for p in r.failed if p != "P5"]
    out.append(Check("e", "x+xy on 3n breaks some of P1-P4", bool(failed), "fails " + ",".join(failed)))
    r = partition_operation_report(fixtures.algebra("a_inf_2"), t)
    ok = r.pseudopartition and not r.partition
    out.append(Check("f", "x+xy on a_inf_2 satisfies P1-P4, not P5", ok, "fails " + ",".join(r.failed)))
    return out


def _squag_check() -> Check:
    A = fixtures.algebra("squag3")
    sq = satisfies_all(A, fixtures.axioms("squag")).holds
    reg = satisfies_identity(A, parse_identity("(mul x (mul x (mul y z))) = (mul (mul x (mul x y)) z)", GROUPOID)).holds
    return Check("g", "squag3 is a squag satisfying x(x.yz)=(x.xy)z", sq and reg, f"squag={sq} identity={reg}")


def _separating_checks() -> list[Check]:
    flex = parse_identity(FLEXIBLE, GROUPOID)
    found = find_separating_model(enumerate_lz_sums(TOP_FIRST_CHAIN, (2, 2)), flex)
    shown = FiniteAlgebra(GROUPOID, 4, {"mul": SEPARATING_TABLE})
    env = {"x": 0, "y": 2}
    lhs, rhs = eval(shown, flex.lhs, env), eval(shown, flex.rhs, env)
    listed = any(np.array_equal(B.table("mul"), SEPARATING_TABLE) for B in enumerate_lz_sums(TOP_FIRST_CHAIN, (2, 2)))
    ok = found is not None and found[0].size == 4 and listed and (lhs, rhs) == (2, 3)
    seen = "none" if found is None else f"size {found[0].size} at " + " ".join(f"{k}={v}" for k, v in found[1].items())
    seen += f"; shown table lhs={lhs} rhs={rhs}"
    return [Check("h", "separating model for x(yx)=(xy)x in LZoS at size 4", ok, seen)]


def _census_check() -> Check:
    c = band_census(4)
    n_bad = len(c.equivalence_violations) + len(c.rectangular_violations)
    total = sum(c.counts.values())
    return Check("i", "band census up to size 4 has no violations", c.ok, f"{total} bands, {n_bad} violations")


def _fixture_checks() -> list[Check]:
    out = []
    derived = all(
        fixtures.bichain(order).key() == fixtures.algebra(f"bichain_{k}").key()
        for k, order in fixtures.BICHAIN_JOIN_ORDERS.items()
    )
    built = fixtures.bounded_lattice_with_infinity(fixtures.two_element_lattice(), 0, 1)
    same = built.key() == fixtures.algebra("a_inf_2").key()
    out.append(Check("j", "bichain and a_inf_2 files match their constructions", derived and same, f"bichains={derived} a_inf_2={same}"))
    v = satisfies_identity(fixtures.algebra("exss"), parse_identity("(mul x y) = (mul y x)", GROUPOID))
    out.append(Check("k", "exss is not commutative, first witness x=3 y=5", v.witness == {"x": 3, "y": 5}, v.witness_text()))
    return out


def run_paper_suite(exss: FiniteAlgebra | None = None, census: bool = True) -> SuiteReport:
    """Run every check; ``exss`` substitutes the 7-element groupoid."""
    A = fixtures.algebra("exss") if exss is None else exss
    checks = _exss_checks(A) + _bichain_checks() + [_squag_check()] + _separating_checks()
    if census:
        checks.append(_census_check())
    checks += _fixture_checks()
    return SuiteReport(checks, steiner_search(4).text())
