import pytest

from semisum import fixtures
from semisum.algebra import satisfies_all, satisfies_quasi
from semisum.equations import (
    AxiomSet,
    Dot,
    QuasiIdentity,
    canonical_binary,
    commutative_sum_quasi_identity,
    is_regular,
    parse_axioms,
    parse_formula,
    parse_identity,
    plonka_axioms,
    prolong,
    prolong_set,
    pseudo_plonka_axioms,
    quasi_regularization_quasi_identity,
    semilattice_base,
    strongly_irregular_witnesses,
)
from semisum.errors import ParseError
from semisum.search import all_bands, semilattices
from semisum.terms import parse_signature, parse_term, print_term

from conftest import BIS, MUL


def I(text, sig=MUL):
    return parse_identity(text, sig)


class TestParsing:
    def test_identity(self):
        id = I("(mul x y) = (mul y x)")
        assert print_term(id.lhs) == "(mul x y)" and id.variables == ("x", "y")

    def test_quasi(self):
        q = parse_formula("(mul x y) = x & (mul y x) = y -> x = y", MUL)
        assert isinstance(q, QuasiIdentity) and len(q.premises) == 2

    @pytest.mark.parametrize("text", ["(mul x y)", "x = y = z", "-> x = y", "x = (mul y)"])
    def test_bad(self, text):
        with pytest.raises(ParseError):
            parse_formula(text, MUL)

    def test_axiom_file_with_signature(self):
        ax = parse_axioms("signature\n  mul 2\nend\nname demo\n(mul x x) = x\n# c\n\n(mul x y) = x\n")
        assert ax.name == "demo" and len(ax.identities) == 2

    def test_axiom_file_error_line(self):
        with pytest.raises(ParseError) as exc:
            parse_axioms("(mul x x) = x\n(mul x) = x\n", MUL)
        assert exc.value.line == 2

    def test_missing_signature(self):
        with pytest.raises(ParseError):
            parse_axioms("(mul x x) = x\n")

    def test_text_round_trip(self):
        ax = fixtures.axioms("lattice")
        again = parse_axioms(ax.text())
        assert again.identities == ax.identities and again.signature == ax.signature


class TestRegularity:
    @pytest.mark.parametrize(
        "text,regular", [("(mul x y) = (mul y x)", True), ("(mul x y) = x", False), ("x = x", True)]
    )
    def test_is_regular(self, text, regular):
        assert is_regular(I(text)) is regular

    @pytest.mark.parametrize(
        "texts,expected",
        [
            (["(mul x y) = x"], ["(mul x y)"]),
            (["(mul (mul x y) y) = x"], ["(mul (mul x y) y)"]),
            (["(mul x y) = (mul y x)"], []),
            (["x = (mul x y)"], ["(mul x y)"]),
            (["(mul x (mul y z)) = x"], []),
        ],
    )
    def test_strongly_irregular(self, texts, expected):
        got = strongly_irregular_witnesses([I(t) for t in texts])
        assert [print_term(t) for t in got] == expected


class TestProlong:
    def test_m1_gives_idempotency(self):
        out = [str(i) for i in prolong(I("(mul y1 y2) = y1"), 1, 1, MUL)]
        assert "(mul x1 x1) = x1" in out

    def test_m2_substitution(self):
        out = [str(i) for i in prolong(I("(mul y1 y2) = y1"), 2, 1, MUL)]
        assert "(mul (mul x1 x2) (mul x2 x1)) = (mul x1 x2)" in out

    def test_trivial(self):
        for m in (1, 2):
            for id in prolong(I("y1 = y1"), m, 1, MUL):
                assert id.lhs == id.rhs

    def test_set_m1_d1(self):
        # r1, r2 range over {x1, (mul x1 x1)}: four substitutions, all distinct
        ax = prolong_set(fixtures.axioms("lz"), 1, 1)
        got = [str(i) for i in ax.identities]
        assert len(got) == 4
        assert got[0] == "(mul x1 x1) = x1"
        assert ax.fragment

    def test_empty(self):
        assert len(prolong_set(AxiomSet("e", MUL), 2, 2)) == 0

    def test_outputs_regular(self):
        for id in prolong_set(fixtures.axioms("lz"), 2, 2).identities:
            assert is_regular(id)

    def test_labels(self):
        ax = prolong_set(fixtures.axioms("lz"), 2, 1)
        assert {i.label.rsplit("[", 1)[1] for i in ax.identities} == {"m=1]", "m=2]"}


class TestCanonicalTerms:
    @pytest.mark.parametrize(
        "sig,expected", [("mul 2", "(mul x y)"), ("f 3", "(f x y y)"), ("inv 1\nmul 2", "(mul x y)")]
    )
    def test_canonical_binary(self, sig, expected):
        assert print_term(canonical_binary(parse_signature(sig))) == expected

    def test_dot_product(self):
        dot = Dot(MUL, parse_term("(mul (mul x y) y)", MUL))
        x, y = parse_term("a", MUL), parse_term("b", MUL)
        assert print_term(dot(x, y)) == "(mul (mul a b) b)"
        assert print_term(dot.product([x, y, x])) == print_term(dot(dot(x, y), x))


class TestSemilatticeBase:
    def test_groupoid(self):
        got = [str(i) for i in semilattice_base(MUL).identities]
        assert got[:3] == ["(mul x x) = x", "(mul x y) = (mul y x)", "(mul x (mul y z)) = (mul (mul x y) z)"]
        assert got[3] == "(mul x1 x2) = (mul x1 x2)"

    def test_bisemilattice_collapses_symbols(self):
        got = [str(i) for i in semilattice_base(BIS).identities]
        assert "(join x1 x2) = (meet x1 x2)" in got

    def test_two_element_semilattice(self, chain2):
        assert satisfies_all(chain2, semilattice_base(MUL)).holds

    def test_lattice_is_not_an_omega_semilattice(self):
        assert not satisfies_all(fixtures.two_element_lattice(), semilattice_base(BIS)).holds


class TestPlonkaAxioms:
    def test_p1(self):
        ax = plonka_axioms(MUL, parse_term("(mul x y)", MUL))
        assert str(ax.identities[0]) == "(mul x x) = x" and ax.identities[0].label == "P1"

    def test_p5_instance(self):
        ax = plonka_axioms(MUL, parse_term("(mul x y)", MUL))
        p5 = [str(i) for i in ax.identities if i.label.startswith("P5")]
        assert p5 == ["(mul (mul x1 x2) y) = (mul (mul x1 y) (mul x2 y))"]

    def test_p4_per_symbol(self):
        t = parse_term("(join x (meet x y))", BIS)
        ax = plonka_axioms(BIS, t)
        assert [i.label for i in ax.identities if i.label.startswith("P4")] == ["P4[meet]", "P4[join]"]

    def test_pseudo_drops_p5(self):
        ax = pseudo_plonka_axioms(MUL, parse_term("(mul x y)", MUL))
        assert not any(i.label.startswith("P5") for i in ax.identities)


class TestQuasiIdentities:
    def test_regularization_quasi_shape(self):
        q = quasi_regularization_quasi_identity(MUL, parse_term("(mul x y)", MUL))
        assert len(q.premises) == 6 and str(q.conclusion) == "x = y"

    def test_regularization_quasi_in_semilattices(self):
        q = quasi_regularization_quasi_identity(MUL, parse_term("(mul x y)", MUL))
        for n in range(1, 5):
            for S in semilattices(n):
                assert satisfies_quasi(S, q).holds

    def test_regularization_quasi_in_left_zero(self):
        q = quasi_regularization_quasi_identity(MUL, parse_term("(mul x y)", MUL))
        for name in ("lz2", "lz3"):
            assert satisfies_quasi(fixtures.algebra(name), q).holds

    def test_cg_quasi_matches_file(self):
        assert fixtures.axioms("cg_quasi").quasi_identities[0].premises == commutative_sum_quasi_identity(MUL).premises

    def test_cg_quasi_holds_in_bands_that_are_commutative(self):
        q = commutative_sum_quasi_identity(MUL)
        for A in all_bands(3):
            if (A.table("mul") == A.table("mul").T).all():
                assert satisfies_quasi(A, q).holds
