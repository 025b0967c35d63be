
import numpy as np
import pytest

from semisum import fixtures
from semisum.algebra import satisfies_all
from semisum.congruence import (
    Congruence,
    all_congruences,
    compose,
    congruence_generated,
    is_congruence,
    join,
    meet,
    parse_partition,
    semilattice_replica,
    violating_tuple,
)
from semisum.equations import semilattice_base
from semisum.errors import ParseError, SizeLimitError
from semisum.search import semilattices

from conftest import groupoid


def P(text, n=None):
    return parse_partition(text, n)


class TestPartitions:
    def test_text_round_trip(self):
        assert str(P("{0,1|2,3|4,5|6}")) == "{0,1|2,3|4,5|6}"

    def test_labels_are_least_elements(self):
        assert P("{3,1|0,2}").labels == (0, 1, 0, 1)

    @pytest.mark.parametrize("text", ["0,1|2", "{0,1|1,2}", "{0,a}", "{0|2}"])
    def test_bad(self, text):
        with pytest.raises(ParseError):
            P(text)

    def test_order(self):
        assert Congruence.identity(3) <= P("{0,1|2}") <= Congruence.total(3)
        assert not P("{0,1|2}") <= P("{0|1,2}")


class TestIsCongruence:
    def test_replica(self, exss):
        assert is_congruence(exss, P("{0,1|2,3|4,5|6}"))

    def test_not(self, exss):
        p = P("{0|1,2|3|4|5|6}")
        assert not is_congruence(exss, p)
        sym, u, v = violating_tuple(exss, p)
        assert sym == "mul" and P("{0|1,2|3|4|5|6}").relates(*u[:1] + u[1:]) is not None

    def test_identity(self, exss):
        assert is_congruence(exss, Congruence.identity(7))


class TestGenerated:
    def test_cg24(self, exss):
        assert str(congruence_generated(exss, [(2, 4)])) == "{0,2,4|1|3|5|6}"

    def test_empty(self, exss):
        assert congruence_generated(exss, []) == Congruence.identity(7)

    def test_minimal_against_oracle(self, exss):
        theta = congruence_generated(exss, [(0, 6)])
        above = [c for c in all_congruences(exss) if c.relates(0, 6)]
        assert theta in above and all(theta <= c for c in above)


class TestLatticeOps:
    def test_join_identity(self, exss):
        theta = congruence_generated(exss, [(2, 4)])
        assert join(exss, theta, Congruence.identity(7)) == theta

    def test_meet_total(self, exss):
        theta = congruence_generated(exss, [(2, 4)])
        assert meet(theta, Congruence.total(7)) == theta

    def test_three_fold_composite_on_exss(self, exss):
        # exss is a semilattice sum of semilattices, not of a strongly
        # irregular variety, and the composite stops short of the join
        theta = congruence_generated(exss, [(2, 4)])
        rho = semilattice_replica(exss)
        assert str(join(exss, theta, rho)) == "{0,1,2,3,4,5|6}"
        comp = compose(theta, compose(rho, theta))
        missing = np.argwhere(join(exss, theta, rho).matrix() & ~comp)
        assert [1, 3] in missing.tolist()
        assert not (comp & ~join(exss, theta, rho).matrix()).any()

    def test_compose_relations(self):
        a = P("{0,1|2}")
        b = P("{0|1,2}")
        assert compose(a, b).tolist() == [[1, 1, 1], [1, 1, 1], [0, 1, 1]]


class TestReplica:
    def test_exss(self, exss):
        assert str(semilattice_replica(exss)) == "{0,1|2,3|4,5|6}"

    def test_semilattices(self):
        for n in range(1, 5):
            for S in semilattices(n):
                assert semilattice_replica(S) == Congruence.identity(n)

    def test_right_zero(self, rz2):
        assert semilattice_replica(rz2) == Congruence.total(2)

    def test_minimal_against_oracle(self):
        for A in fixtures.all_algebras():
            rho = semilattice_replica(A)
            base = semilattice_base(A.signature)
            from semisum.algebra import quotient

            good = [c for c in all_congruences(A) if satisfies_all(quotient(A, c)[0], base).holds]
            assert rho in good and all(rho <= c for c in good), A.name


class TestAllCongruences:
    def test_two_element_semilattice(self, chain2):
        assert len(all_congruences(chain2)) == 2

    def test_exss(self, exss):
        cons = all_congruences(exss)
        assert P("{0,1|2,3|4,5|6}") in cons and congruence_generated(exss, [(2, 4)]) in cons

    def test_chain3(self, chain3):
        assert len(all_congruences(chain3)) == 4

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            all_congruences(groupoid(np.zeros((8, 8), int)))
