"""Command-line front end.

Exit codes: 0 holds / built, 1 fails / witness found, 2 usage or format
error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings

from . import fixtures
from .algebra import FiniteAlgebra, format_algebra, format_ualg, load_ualg, satisfies_all
from .congruence import semilattice_replica
from .equations import AxiomSet, parse_axioms, parse_formula, prolong_set
from .errors import BudgetExceeded, ConstructionError, UalgError
from .maltsev import decompose, format_membership, in_product_with_S, in_relative_product, partition_operation_report
from .search import band_census, enumerate_lz_sums, find_separating_model
from .sums import free_semilattice, lallement_sum, parse_sum, plonka_sum
from .terms import parse_term

OK, FAIL, USAGE, BUDGET = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _algebras(path: str) -> list[FiniteAlgebra]:
    """Algebras from a .ualg path, or a shipped fixture by name."""
    if not os.path.exists(path) and not path.endswith(".ualg"):
        return [fixtures.algebra(path)]
    algs = load_ualg(path)
    if not algs:
        raise UalgError(f"{path}: no algebra")
    return algs


def _one(path: str) -> FiniteAlgebra:
    return _algebras(path)[0]


def _axioms(path: str) -> AxiomSet:
    return parse_axioms(_read(path), name=os.path.splitext(os.path.basename(path))[0])


def _formulas(arg: str, A: FiniteAlgebra) -> AxiomSet:
    if os.path.exists(arg):
        return parse_axioms(_read(arg), A.signature)
    f = parse_formula(arg, A.signature)
    if hasattr(f, "premises"):
        return AxiomSet("", A.signature, (), (f,))
    return AxiomSet("", A.signature, (f,))


def cmd_check(args) -> int:
    status = OK
    algs = _algebras(args.algebra)
    for A in algs:
        ax = _formulas(args.equations, A)
        v = satisfies_all(A, ax, args.budget)
        prefix = f"{A.name}: " if len(algs) > 1 else ""
        if v.holds:
            print(f"{prefix}holds")
        else:
            print(f"{prefix}fails: {v.formula} at {v.witness_text()}")
            status = FAIL
    return status


def cmd_replica(args) -> int:
    print(semilattice_replica(_one(args.algebra)))
    return OK


def cmd_decompose(args) -> int:
    A = _one(args.algebra)
    dec = decompose(A)
    print(f"replica: {dec.replica}")
    print(format_ualg([dec.quotient.renamed("quotient")]), end="")
    for i, (B, elems) in enumerate(zip(dec.blocks, dec.elements)):
        print(f"# block {i}: {{{','.join(map(str, elems))}}}")
        print(format_algebra(B, f"block{i}"))
    return OK


def cmd_member(args) -> int:
    A = _one(args.algebra)
    V = _axioms(args.variety)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if args.within:
            v = in_relative_product(A, V, _axioms(args.within), args.budget)
        else:
            v = in_product_with_S(A, V, args.budget)
    print(format_membership(A, V, v), end="")
    return OK if v.holds else FAIL


def cmd_paudit(args) -> int:
    A = _one(args.algebra)
    r = partition_operation_report(A, parse_term(args.term, A.signature))
    print(r.text(), end="")
    return OK if r.partition else FAIL


def cmd_prolong(args) -> int:
    ax = prolong_set(_axioms(args.variety), args.m, args.d)
    print(ax.text(), end="")
    return OK


def cmd_plonka(args) -> int:
    data = parse_sum(_read(args.system))
    A, dec = plonka_sum(data.plonka_system())
    print(f"blocks: {dec.replica}")
    print(format_ualg([A.renamed("plonka-sum")]), end="")
    return OK


def cmd_lallement(args) -> int:
    data = parse_sum(_read(args.system))
    A, dec, strict = lallement_sum(data.lallement_data())
    print(f"blocks: {dec.replica}")
    print(f"strict: {'yes' if strict else 'no'}")
    print(format_ualg([A.renamed("lallement-sum")]), end="")
    return OK


def cmd_freesl(args) -> int:
    X = [f"x{i}" for i in range(1, args.x + 1)]
    A, labels = free_semilattice(X)
    for i, subset in enumerate(labels):
        print(f"# {i} = {{{','.join(subset)}}}")
    print(format_ualg([A]), end="")
    return OK


def cmd_census(args) -> int:
    c = band_census(args.n)
    print(c.text(), end="")
    return OK if c.ok else FAIL


def cmd_separate(args) -> int:
    S_path, blocks = args.lz_sum
    S = _one(S_path)
    sizes = [int(b) for b in blocks.split(",") if b]
    gen = enumerate_lz_sums(S, sizes)
    first = next(enumerate_lz_sums(S, sizes), None)
    if first is None:
        print("no algebras")
        return OK
    id = parse_formula(args.equation, first.signature)
    found = find_separating_model(gen, id)
    if found is None:
        print("no separating model")
        return OK
    A, asg = found
    print("witness: " + " ".join(f"{k}={v}" for k, v in asg.items()))
    print(format_ualg([A.renamed("witness")]), end="")
    return FAIL


def cmd_suite(args) -> int:
    from .suite import run_paper_suite

    r = run_paper_suite()
    print(r.text(), end="")
    return OK if r.ok else FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="semisum", description="Semilattice sums of finite algebras.")
    p.add_argument("--budget", type=int, default=None, help="evaluation budget (assignments)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("check", cmd_check, "check formulas in an algebra")
    sp.add_argument("-a", "--algebra", required=True)
    sp.add_argument("-e", "--equations", required=True, help="formula or .eq file")
    sp = add("replica", cmd_replica, "semilattice replica congruence")
    sp.add_argument("-a", "--algebra", required=True)
    sp = add("decompose", cmd_decompose, "quotient and blocks of the replica")
    sp.add_argument("-a", "--algebra", required=True)
    sp = add("member", cmd_member, "membership in V o S")
    sp.add_argument("-a", "--algebra", required=True)
    sp.add_argument("-v", "--variety", required=True)
    sp.add_argument("-w", "--within", help="relative to this .eq")
    sp = add("paudit", cmd_paudit, "partition-operation audit")
    sp.add_argument("-a", "--algebra", required=True)
    sp.add_argument("-t", "--term", required=True)
    sp = add("prolong", cmd_prolong, "bounded prolongation of an axiom set")
    sp.add_argument("-v", "--variety", required=True)
    sp.add_argument("-m", type=int, required=True)
    sp.add_argument("-d", type=int, required=True)
    sp = add("plonka", cmd_plonka, "build a Plonka sum")
    sp.add_argument("-s", "--system", required=True)
    sp = add("lallement", cmd_lallement, "build a Lallement sum")
    sp.add_argument("-s", "--system", required=True)
    sp = add("freesl", cmd_freesl, "free semilattice on N generators")
    sp.add_argument("-x", type=int, required=True)
    sp = add("census-bands", cmd_census, "band census")
    sp.add_argument("-n", type=int, required=True)
    sp = add("separate", cmd_separate, "separating model among lz-sums")
    sp.add_argument("--lz-sum", nargs=2, metavar=("S", "BLOCKS"), required=True)
    sp.add_argument("-e", "--equation", required=True)
    add("paper-suite", cmd_suite, "run the example suite")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return BUDGET
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return FAIL
    except (UalgError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
