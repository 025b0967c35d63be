
import pytest

from semisum import fixtures
from semisum.algebra import quotient, satisfies_all
from semisum.congruence import Congruence, all_congruences, congruence_generated, semilattice_replica
from semisum.equations import prolong_set, semilattice_base
from semisum.errors import NotACongruenceError, SignatureError
from semisum.maltsev import (
    block_transfer_violation,
    check_three_permutability,
    decompose,
    format_membership,
    in_product_with_S,
    in_relative_product,
    partition_operation_report,
)
from semisum.search import BAND, LEFT_ZERO, all_bands, enumerate_lz_sums, semilattices
from semisum.terms import parse_term

from conftest import BIS, MUL

X_PLUS_XY = parse_term("(join x (meet x y))", BIS)
MUL_T = parse_term("(mul x y)", MUL)


class TestDecompose:
    def test_exss(self, exss):
        dec = decompose(exss)
        assert dec.elements == [(0, 1), (2, 3), (4, 5), (6,)]
        assert dec.quotient.size == 4 and satisfies_all(dec.quotient, semilattice_base(MUL)).holds
        assert dec.block_of(5) == 2

    def test_semilattice(self, chain3):
        assert [len(e) for e in decompose(chain3).elements] == [1, 1, 1]

    def test_left_zero(self, lz2):
        dec = decompose(lz2)
        assert dec.elements == [(0, 1)] and dec.quotient.size == 1 and dec.blocks[0] == lz2


class TestMembership:
    def test_exss_in_SoS(self, exss):
        assert in_product_with_S(exss, semilattice_base(MUL)).holds

    def test_quotient_not_in_SoS(self, exss):
        B, _ = quotient(exss, congruence_generated(exss, [(2, 4)]))
        v = in_product_with_S(B, semilattice_base(MUL))
        assert not v.holds and v.block is not None

    def test_right_zero(self, rz2):
        v = in_product_with_S(rz2, LEFT_ZERO)
        assert not v.holds and v.witness == {"x": 0, "y": 1} and v.block == 0

    def test_witness_uses_original_labels(self, exss):
        v = in_product_with_S(exss, fixtures.axioms("lz"))
        assert not v.holds
        elems = decompose(exss).elements[v.block]
        assert set(v.witness.values()) <= set(elems)

    def test_quasi_identities_flagged(self, exss):
        with pytest.warns(UserWarning):
            v = in_product_with_S(exss, fixtures.axioms("cg_quasi"))
        assert v.holds and v.note == "replica-based"

    def test_format(self, exss):
        v = in_product_with_S(exss, semilattice_base(MUL))
        text = format_membership(exss, semilattice_base(MUL), v)
        assert text.splitlines()[0] == "replica: {0,1|2,3|4,5|6}"
        assert text.splitlines()[-1] == "verdict: MEMBER"


class TestRelative:
    def test_left_regular(self):
        assert in_relative_product(fixtures.algebra("lr3"), LEFT_ZERO, BAND).holds

    def test_right_zero(self, rz2):
        assert not in_relative_product(rz2, LEFT_ZERO, BAND).holds

    def test_outside_W(self, exss):
        v = in_relative_product(exss, semilattice_base(MUL), LEFT_ZERO)
        assert not v.holds and v.note == "fails W"

    def test_semilattices(self):
        for S in semilattices(3):
            assert in_relative_product(S, LEFT_ZERO, BAND).holds


class TestPartitionReport:
    def test_bichain_3n(self):
        r = partition_operation_report(fixtures.algebra("bichain_3n"), X_PLUS_XY)
        assert not r.holds("P3")
        assert "P3: FAIL at x=2 y=0 z=1" in r.text()
        A = fixtures.algebra("bichain_3n")
        from semisum.algebra import eval

        t = lambda a, b: eval(A, X_PLUS_XY, {"x": a, "y": b})
        assert t(2, t(0, 1)) == 0 and t(2, t(1, 0)) == 1

    def test_a_inf(self):
        r = partition_operation_report(fixtures.algebra("a_inf_2"), X_PLUS_XY)
        assert r.pseudopartition and not r.partition and r.failed == ["P5"]
        assert r.relation_matches_replica
        assert r.text().splitlines()[-3:] == ["operation: pseudopartition", "replica: {0,1|2}", "verdict: NON-MEMBER"]

    def test_lz_sums_mostly_not_plonka(self):
        kinds = [partition_operation_report(A, MUL_T).partition for A in enumerate_lz_sums(fixtures.algebra("chain2"), (2, 2))]
        # Plonka sums over the chain are fixed by one map between the two
        # 2-element blocks, and there are 4 such maps
        assert sum(kinds) == 4

    def test_needs_binary_term(self):
        with pytest.raises((SignatureError, ValueError)):
            partition_operation_report(fixtures.algebra("exss"), parse_term("(mul x (mul y z))", MUL))


class TestThreePermutability:
    def test_exss_cg24_fails(self, exss):
        # exss sits in S o S; the lemma needs a strongly irregular variety
        assert not check_three_permutability(exss, congruence_generated(exss, [(2, 4)]))

    def test_identity_and_total(self, exss):
        assert check_three_permutability(exss, Congruence.identity(7))
        assert check_three_permutability(exss, Congruence.total(7))

    def test_invalid(self, exss):
        with pytest.raises(NotACongruenceError):
            check_three_permutability(exss, Congruence((0, 1, 1, 3, 4, 5, 6)))

    def test_all_bands_of_size_3_in_LZoS(self):
        for A in all_bands(3):
            if not in_product_with_S(A, LEFT_ZERO).holds:
                continue
            rho = semilattice_replica(A)
            for th in all_congruences(A):
                assert check_three_permutability(A, th, rho)
                assert block_transfer_violation(A, th, rho, MUL_T) is None


class TestUniquenessAndProlongation:
    def test_replica_is_the_only_lz_decomposition(self):
        for A in enumerate_lz_sums(fixtures.algebra("chain2"), (2, 1)):
            rho = semilattice_replica(A)
            for th in all_congruences(A):
                Q, _ = quotient(A, th)
                if th == rho or not satisfies_all(Q, semilattice_base(MUL)).holds:
                    continue
                blocks_ok = all(
                    satisfies_all(B, LEFT_ZERO).holds
                    for B in decompose(A, th).blocks
                )
                assert not blocks_ok

    def test_members_satisfy_prolongation(self):
        pro = prolong_set(LEFT_ZERO, 2, 1)
        for A in all_bands(3):
            if in_product_with_S(A, LEFT_ZERO).holds:
                assert satisfies_all(A, pro).holds

    def test_cg_members_satisfy_quasi(self):
        q = fixtures.axioms("cg_quasi")
        comm = fixtures.axioms("commutative")
        for A in all_bands(3):
            if in_product_with_S(A, comm).holds:
                assert satisfies_all(A, q).holds
