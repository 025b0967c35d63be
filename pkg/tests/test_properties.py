"""Randomised properties."""

import numpy as np
from hypothesis import given, settings, strategies as st

from semisum.algebra import FiniteAlgebra, quotient, satisfies_all
from semisum.congruence import (
    Congruence,
    all_congruences,
    congruence_generated,
    is_congruence,
    join,
    meet,
    parse_partition,
    semilattice_replica,
)
from semisum.equations import canonical_binary, commutative_sum_quasi_identity, semilattice_base
from semisum.maltsev import decompose, partition_operation_report
from semisum.search import random_commutative_sum, random_plonka_system
from semisum.sums import plonka_sum
from semisum.terms import parse_term, print_term

from conftest import MUL


@st.composite
def groupoids(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    cells = draw(st.lists(st.integers(0, n - 1), min_size=n * n, max_size=n * n))
    return FiniteAlgebra(MUL, n, {"mul": np.array(cells).reshape(n, n)})


@st.composite
def partitions(draw, n):
    return Congruence.from_partition(n, draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n)))


@st.composite
def terms(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return draw(st.sampled_from(["x", "y", "z"]))
    return f"(mul {draw(terms(depth - 1))} {draw(terms(depth - 1))})"


@given(terms())
def test_term_round_trip(text):
    assert print_term(parse_term(text, MUL)) == text


@given(st.integers(1, 6).flatmap(lambda n: partitions(n)))
def test_partition_text_round_trip(p):
    assert parse_partition(str(p), p.size) == p


@settings(max_examples=60, deadline=None)
@given(groupoids(), st.data())
def test_generated_is_least(A, data):
    a = data.draw(st.integers(0, A.size - 1))
    b = data.draw(st.integers(0, A.size - 1))
    theta = congruence_generated(A, [(a, b)])
    assert is_congruence(A, theta) and theta.relates(a, b)
    for c in all_congruences(A):
        if c.relates(a, b):
            assert theta <= c


@settings(max_examples=60, deadline=None)
@given(groupoids())
def test_replica_is_least_semilattice_congruence(A):
    rho = semilattice_replica(A)
    base = semilattice_base(MUL)
    assert satisfies_all(quotient(A, rho)[0], base).holds
    for c in all_congruences(A):
        if satisfies_all(quotient(A, c)[0], base).holds:
            assert rho <= c


@settings(max_examples=40, deadline=None)
@given(groupoids(), st.data())
def test_join_meet_bounds(A, data):
    cons = all_congruences(A)
    a = data.draw(st.sampled_from(cons))
    b = data.draw(st.sampled_from(cons))
    j, m = join(A, a, b), meet(a, b)
    assert a <= j and b <= j and m <= a and m <= b
    assert is_congruence(A, j) and is_congruence(A, m)


@settings(max_examples=40, deadline=None)
@given(groupoids())
def test_decomposition_is_a_partition(A):
    dec = decompose(A)
    flat = sorted(e for elems in dec.elements for e in elems)
    assert flat == list(range(A.size)) and dec.quotient.size == len(dec.blocks)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["mul", "lz-rz", "mul-u"]))
def test_plonka_sums_are_partition_algebras(seed, kind):
    sys = random_plonka_system(np.random.default_rng(seed), 6, kind)
    A, dec = plonka_sum(sys)
    r = partition_operation_report(A, canonical_binary(A.signature))
    assert r.partition and r.relation == dec.replica


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_commutative_sums_satisfy_quasi(seed):
    A = random_commutative_sum(np.random.default_rng(seed), 6)
    assert satisfies_all(A, [commutative_sum_quasi_identity(MUL)]).holds
