"""Acceptance criteria 1-10, one timed check each.

Each check prints ``criterion N: PASS|FAIL (seconds) detail``.  Run directly
(``python3 tests/test_acceptance.py``) or through pytest.
"""

from __future__ import annotations

import os
import subprocess
import sys
import time

import numpy as np
import pytest

from semisum import fixtures
from semisum.algebra import FiniteAlgebra, eval, quotient, satisfies_all
from semisum.congruence import all_congruences, congruence_generated, semilattice_replica
from semisum.equations import (
    canonical_binary,
    commutative_sum_quasi_identity,
    parse_identity,
    prolong_set,
    semilattice_base,
)
from semisum.maltsev import in_product_with_S, partition_operation_report
from semisum.search import (
    GROUPOID,
    LEFT_ZERO,
    band_census,
    enumerate_lz_sums,
    find_separating_model,
    lz_lemma_scan,
    random_commutative_sum,
    random_plonka_system,
)
from semisum.sums import plonka_sum
from semisum.terms import parse_term

SEED = 20261019
FLEX = parse_identity("(mul x (mul y x)) = (mul (mul x y) x)", GROUPOID)
SHOWN = np.array([[0, 0, 2, 2], [1, 1, 2, 2], [3, 2, 2, 2], [2, 2, 3, 3]])


def _chain2():
    return fixtures.algebra("chain2")


def c1():
    A = fixtures.algebra("exss")
    sl = fixtures.axioms("semilattice")
    rho = str(semilattice_replica(A))
    theta = congruence_generated(A, [(2, 4)])
    B, block_map = quotient(A, theta)
    v = satisfies_all(B, [commutative_sum_quasi_identity(GROUPOID)])
    classes = None if v.holds else tuple(block_map.index(v.witness[k]) for k in ("x", "y", "z"))
    ok = (
        rho == "{0,1|2,3|4,5|6}"
        and str(theta) == "{0,2,4|1|3|5|6}"
        and classes == (3, 5, 6)
        and in_product_with_S(A, sl).holds
        and not in_product_with_S(B, sl).holds
    )
    return ok, f"replica {rho}, Cg(2,4) {theta}, quasi witness classes of {classes}"


def c2():
    c = band_census(4)
    bad = len(c.equivalence_violations) + len(c.rectangular_violations)
    return c.ok, f"{sum(c.counts.values())} bands, {bad} violations"


def c3():
    pro = prolong_set(LEFT_ZERO, 2, 2)
    algs = list(enumerate_lz_sums(_chain2(), (2, 2)))
    bad = sum(not satisfies_all(A, pro).holds for A in algs)
    return len(algs) == 256 and bad == 0, f"{len(algs)} algebras x {len(pro)} identities, {bad} violations"


def c4():
    found = find_separating_model(enumerate_lz_sums(_chain2(), (2, 2)), FLEX)
    shown = FiniteAlgebra(GROUPOID, 4, {"mul": SHOWN})
    lhs = eval(shown, FLEX.lhs, {"x": 0, "y": 2})
    rhs = eval(shown, FLEX.rhs, {"x": 0, "y": 2})
    member = in_product_with_S(shown, LEFT_ZERO).holds
    ok = found is not None and found[0].size == 4 and (lhs, rhs) == (2, 3) and member
    return ok, f"witness at {found[1] if found else None}; shown table lhs={lhs} rhs={rhs}"


def c5():
    rng = np.random.default_rng(SEED)
    kinds = ("mul", "lz-rz", "mul-u")
    bad = 0
    for i in range(100):
        A, dec = plonka_sum(random_plonka_system(rng, 6, kinds[i % 3]))
        r = partition_operation_report(A, canonical_binary(A.signature))
        bad += not (r.partition and r.relation == semilattice_replica(A) == dec.replica)
    t = parse_term("(join x (meet x y))", fixtures.BISEMILATTICE)
    a_inf = partition_operation_report(fixtures.algebra("a_inf_2"), t)
    b3n = partition_operation_report(fixtures.algebra("bichain_3n"), t)
    fails_3n = [p for p in b3n.failed if p != "P5"]
    ok = bad == 0 and a_inf.failed == ["P5"] and bool(fails_3n)
    return ok, f"{bad}/100 systems off; a_inf_2 fails {a_inf.failed}; 3n fails {fails_3n}"


def c6():
    s = lz_lemma_scan(5)
    detail = (
        f"{s.algebras} lz-sums, {s.congruences} congruences, "
        f"{s.three_perm_violations} 3-perm and {s.transfer_violations} transfer violations"
    )
    return s.ok and s.algebras > 0, detail


def c7():
    checked = 0
    for A in fixtures.all_algebras():
        if A.size > 6:
            continue
        cons = all_congruences(A)
        for a in range(A.size):
            for b in range(a + 1, A.size):
                theta = congruence_generated(A, [(a, b)])
                above = [c for c in cons if c.relates(a, b)]
                if theta not in above or not all(theta <= c for c in above):
                    return False, f"{A.name}: Cg({a},{b}) is not least"
                checked += 1
        rho = semilattice_replica(A)
        base = semilattice_base(A.signature)
        good = [c for c in cons if satisfies_all(quotient(A, c)[0], base).holds]
        if rho not in good or not all(rho <= c for c in good):
            return False, f"{A.name}: replica is not least"
    return True, f"{checked} principal congruences and every replica agree with the oracle"


def c8():
    lat = fixtures.axioms("lattice")
    got = {k: in_product_with_S(fixtures.algebra(f"bichain_{k}"), lat).holds for k in ("3m", "3j", "3n")}
    return got == {"3m": False, "3j": False, "3n": True}, str(got)


def c9():
    rng = np.random.default_rng(SEED)
    q = [commutative_sum_quasi_identity(GROUPOID)]
    bad = sum(not satisfies_all(random_commutative_sum(rng, 6), q).holds for _ in range(100))
    return bad == 0, f"{bad}/100 violations"


def c10():
    outs = []
    for _ in range(2):
        proc = subprocess.run([sys.executable, "-m", "semisum", "paper-suite"], capture_output=True, env=dict(os.environ))
        outs.append((proc.returncode, proc.stdout))
    same = outs[0] == outs[1]
    return same and outs[0][0] == 0, f"identical={same}, exit={outs[0][0]}, {len(outs[0][1])} bytes"


CRITERIA = [
    (1, "exss reproduction", c1, 1.0),
    (2, "band theorem up to size 4", c2, 120.0),
    (3, "prolongation soundness on 256 lz-sums", c3, 60.0),
    (4, "finite separating witness", c4, 10.0),
    (5, "Plonka and partition audit", c5, 30.0),
    (6, "congruence lemmas on lz-sums up to size 5", c6, 120.0),
    (7, "oracle equivalences on fixtures", c7, 120.0),
    (8, "bichain membership", c8, 1.0),
    (9, "quasi-identity on commutative sums", c9, 60.0),
    (10, "paper-suite determinism", c10, None),
]


def run_criterion(fn, limit):
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    in_time = limit is None or dt < limit
    return ok and in_time, dt, detail + ("" if in_time else f" (over the {limit:g} s limit)")


def _line(num, name, passed, dt, detail):
    return f"criterion {num}: {'PASS' if passed else 'FAIL'} ({dt:.2f} s) {name}: {detail}"


@pytest.mark.parametrize("num,name,fn,limit", CRITERIA, ids=[f"c{c[0]}" for c in CRITERIA])
def test_criterion(num, name, fn, limit, capsys):
    passed, dt, detail = run_criterion(fn, limit)
    with capsys.disabled():
        print("\n" + _line(num, name, passed, dt, detail))
    assert passed, detail


if __name__ == "__main__":
    failures = 0
    for num, name, fn, limit in CRITERIA:
        passed, dt, detail = run_criterion(fn, limit)
        failures += not passed
        print(_line(num, name, passed, dt, detail), flush=True)
    sys.exit(1 if failures else 0)
