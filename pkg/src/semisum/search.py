"""Bounded model enumeration and counterexample search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .algebra import (
    FiniteAlgebra,
    canonical_form,
    first_failing_identity,
    satisfies_all,
    satisfies_identity,
)
from .congruence import all_congruences, semilattice_replica
from .equations import AxiomSet, Identity, parse_identity, prolong_set
from .errors import SizeLimitError
from .maltsev import block_transfer_violation, check_three_permutability, decompose, in_product_with_S
from .terms import App, Signature, Term, Var

GROUPOID = Signature((("mul", 2),))
LZ_SUM_LIMIT = 8
BAND_CENSUS_LIMIT = 4
DEFAULT_MAX_TABLES = 10**7


def _ident(text: str) -> Identity:
    return parse_identity(text, GROUPOID)


LEFT_ZERO = AxiomSet("left-zero", GROUPOID, (_ident("(mul x y) = x"),))
COMMUTATIVE = AxiomSet("commutative", GROUPOID, (_ident("(mul x y) = (mul y x)"),))
BAND = AxiomSet(
    "band",
    GROUPOID,
    (_ident("(mul x x) = x"), _ident("(mul x (mul y z)) = (mul (mul x y) z)")),
)
LEFT_REGULAR = _ident("(mul (mul x y) x) = (mul x y)")
RECTANGULAR = _ident("(mul (mul x y) x) = x")


# -- generic enumeration ---------------------------------------------------


@dataclass
class SearchSpec:
    signature: Signature
    sizes: Sequence[int]
    constraints: AxiomSet | None = None
    # raw | band | commutative-idempotent | lz-sum
    generator: str = "raw"
    dedup: str = "none"
    max_tables: int = DEFAULT_MAX_TABLES
    # for the lz-sum generator
    semilattice: FiniteAlgebra | None = None
    block_sizes: Sequence[int] | None = None


class ModelSearch:
    """Iterable over the models of a :class:`SearchSpec`.

    Stops early when ``max_tables`` candidate tables have been examined; then
    ``complete`` is False and the models yielded so far are a partial list.
    """

    def __init__(self, spec: SearchSpec):
        self.spec = spec
        self.examined = 0
        self.complete = True

    def __iter__(self) -> Iterator[FiniteAlgebra]:
        spec = self.spec
        seen = set()
        for cand in self._candidates():
            if self.examined >= spec.max_tables:
                self.complete = False
                return
            self.examined += 1
            if spec.constraints is not None and len(spec.constraints):
                if not satisfies_all(cand, spec.constraints).holds:
                    continue
            if spec.dedup == "iso":
                key = canonical_form(cand)
                if key in seen:
                    continue
                seen.add(key)
            yield cand

    def _candidates(self) -> Iterator[FiniteAlgebra]:
        spec = self.spec
        kind = spec.generator
        if kind == "lz-sum":
            yield from enumerate_lz_sums(spec.semilattice, spec.block_sizes)
            return
        for n in spec.sizes:
            if kind == "raw":
                yield from _backtrack(spec.signature, n, spec.constraints)
            elif kind == "band":
                yield from all_bands(n)
            elif kind == "commutative-idempotent":
                yield from commutative_idempotent_groupoids(n)
            else:
                raise ValueError(f"unknown generator {kind!r}")


def enumerate_models(spec: SearchSpec) -> ModelSearch:
    return ModelSearch(spec)


def _partial_value(tables, n, t: Term, env):
    if isinstance(t, Var):
        return env[t.name]
    args = [_partial_value(tables, n, a, env) for a in t.args]
    T = tables[t.symbol]
    if not args:
        return np.full(len(next(iter(env.values()))) if env else 1, T[()], dtype=np.int64)
    valid = np.ones(args[0].shape, dtype=bool)
    for a in args:
        valid &= a >= 0
    idx = tuple(np.where(valid, a, 0) for a in args)
    out = T[idx].copy()
    out[~valid] = -1
    return out


def _violated(tables, n, formulas, grids) -> bool:
    for f in formulas:
        env = grids[f.variables]
        if isinstance(f, Identity):
            l = _partial_value(tables, n, f.lhs, env)
            r = _partial_value(tables, n, f.rhs, env)
            if ((l >= 0) & (r >= 0) & (l != r)).any():
                return True
        else:
            mask = None
            for p in f.premises:
                l = _partial_value(tables, n, p.lhs, env)
                r = _partial_value(tables, n, p.rhs, env)
                m = (l >= 0) & (l == r)
                mask = m if mask is None else mask & m
            l = _partial_value(tables, n, f.conclusion.lhs, env)
            r = _partial_value(tables, n, f.conclusion.rhs, env)
            m = (l >= 0) & (r >= 0) & (l != r)
            if mask is not None:
                m &= mask
            if m.any():
                return True
    return False


def _backtrack(sig: Signature, n: int, constraints: AxiomSet | None) -> Iterator[FiniteAlgebra]:
    """All tables on n elements, pruning on constraint instances whose
    entries are all defined; yields in lexicographic order of the
    concatenated row-major tables."""
    tables = {sym: np.full((n,) * k, -1, dtype=np.int64) for sym, k in sig}
    cells = [(sym, idx) for sym, k in sig for idx in itertools.product(range(n), repeat=k)]
    formulas = constraints.formulas() if constraints is not None else ()
    grids = {}
    for f in formulas:
        vs = f.variables
        if vs not in grids:
            cols = np.unravel_index(np.arange(n ** len(vs)), (n,) * len(vs)) if vs else ()
            grids[vs] = {v: np.asarray(c, dtype=np.int64) for v, c in zip(vs, cols)}

    def rec(pos):
        if pos == len(cells):
            yield FiniteAlgebra(sig, n, {s: T.copy() for s, T in tables.items()})
            return
        sym, idx = cells[pos]
        for v in range(n):
            tables[sym][idx] = v
            if formulas and _violated(tables, n, formulas, grids):
                continue
            yield from rec(pos + 1)
        tables[sym][idx] = -1

    yield from rec(0)


# -- structured generators -------------------------------------------------


def _band_tables(n: int) -> np.ndarray:
    cap = 1024
    while True:
        out = np.zeros((cap, n, n), dtype=np.int64)
        count = _kernels.band_search(n, out)
        if count <= cap:
            return out[:count]
        cap = count


def all_bands(n: int) -> list[FiniteAlgebra]:
    """Every idempotent associative table on n elements."""
    return [FiniteAlgebra(GROUPOID, n, {"mul": T}) for T in _band_tables(n)]


def commutative_idempotent_groupoids(n: int) -> Iterator[FiniteAlgebra]:
    cells = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for vals in itertools.product(range(n), repeat=len(cells)):
        T = np.zeros((n, n), dtype=np.int64)
        T[np.arange(n), np.arange(n)] = np.arange(n)
        for (i, j), v in zip(cells, vals):
            T[i, j] = T[j, i] = v
        yield FiniteAlgebra(GROUPOID, n, {"mul": T})


def chain(n: int, sig: Signature = GROUPOID) -> FiniteAlgebra:
    """The n-element chain semilattice 0 < 1 < ... with every symbol acting
    as min."""
    tables = {}
    for sym, k in sig:
        idx = np.indices((n,) * k)
        tables[sym] = idx.min(axis=0) if k else np.zeros((), np.int64)
    return FiniteAlgebra(sig, n, tables, f"chain{n}")


def semilattices(n: int) -> list[FiniteAlgebra]:
    """Groupoid semilattices on n elements up to isomorphism."""
    seen = {}
    for T in _band_tables(n):
        if not np.array_equal(T, T.T):
            continue
        A = FiniteAlgebra(GROUPOID, n, {"mul": T})
        key = canonical_form(A) if n <= 5 else A.key()
        seen.setdefault(key, A)
    return [FiniteAlgebra(GROUPOID, n, {"mul": np.array(k[0]).reshape(n, n)}) for k in sorted(seen)]


def _lz_layout(S: FiniteAlgebra, block_sizes: Sequence[int]):
    T = S.table(S.signature.names[0])
    k = S.size
    if len(block_sizes) != k or min(block_sizes) < 1:
        raise ValueError("need a positive block size for every element of S")
    offs = [0] + list(itertools.accumulate(block_sizes))
    n = offs[-1]
    owner = [s for s in range(k) for _ in range(block_sizes[s])]
    T0 = np.zeros((n, n), dtype=np.int64)
    cells = []
    for a in range(n):
        for b in range(n):
            s, t = owner[a], owner[b]
            if s == t:
                T0[a, b] = a
            else:
                st = int(T[s, t])
                cells.append((a, b, offs[st], block_sizes[st]))
    return n, T0, cells


def enumerate_lz_sums(S: FiniteAlgebra, block_sizes: Sequence[int]) -> Iterator[FiniteAlgebra]:
    """Every groupoid that is a semilattice sum of left-zero blocks of the
    given sizes over ``S``; blocks are contiguous in S's element order."""
    if sum(block_sizes) > LZ_SUM_LIMIT:
        raise SizeLimitError(f"lz-sum enumeration limited to total size {LZ_SUM_LIMIT}")
    v = satisfies_all(S, semilattice_base_for(S))
    if not v.holds:
        raise ValueError("S is not a semilattice")
    n, T0, cells = _lz_layout(S, block_sizes)
    ranges = [range(start, start + size) for _, _, start, size in cells]
    for vals in itertools.product(*ranges):
        T = T0.copy()
        for (a, b, _, _), val in zip(cells, vals):
            T[a, b] = val
        yield FiniteAlgebra(GROUPOID, n, {"mul": T})


def semilattice_base_for(S: FiniteAlgebra) -> AxiomSet:
    from .equations import semilattice_base

    return semilattice_base(S.signature)


def find_separating_model(gen: Iterable[FiniteAlgebra], id: Identity):
    """First (algebra, assignment) in ``gen`` where ``id`` fails, or None."""
    for A in gen:
        v = satisfies_identity(A, id)
        if not v.holds:
            return A, v.witness
    return None


# -- band census -----------------------------------------------------------


@dataclass
class CensusRow:
    table: tuple[int, ...]
    left_regular: bool
    member: bool
    rectangular_blocks: bool


@dataclass
class BandCensus:
    max_n: int
    rows: list[CensusRow] = field(default_factory=list)
    counts: dict[int, int] = field(default_factory=dict)

    @property
    def equivalence_violations(self) -> list[CensusRow]:
        return [r for r in self.rows if r.left_regular != r.member]

    @property
    def rectangular_violations(self) -> list[CensusRow]:
        return [r for r in self.rows if not r.rectangular_blocks]

    @property
    def ok(self) -> bool:
        return not self.equivalence_violations and not self.rectangular_violations

    def text(self) -> str:
        lines = []
        for n in sorted(self.counts):
            rows = [r for r in self.rows if int(round(len(r.table) ** 0.5)) == n]
            lr = sum(r.left_regular for r in rows)
            mem = sum(r.member for r in rows)
            lines.append(f"n={n}: bands={self.counts[n]} left-regular={lr} lz-sums={mem}")
        lines.append(f"violations (xyx=xy <=> member): {len(self.equivalence_violations)}")
        lines.append(f"violations (blocks rectangular): {len(self.rectangular_violations)}")
        lines.append(f"verdict: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines) + "\n"


def band_census(max_n: int) -> BandCensus:
    if max_n > BAND_CENSUS_LIMIT:
        raise SizeLimitError(f"band census limited to size {BAND_CENSUS_LIMIT}")
    census = BandCensus(max_n)
    for n in range(1, max_n + 1):
        bands = all_bands(n)
        census.counts[n] = len(bands)
        for A in bands:
            dec = decompose(A)
            member = all(satisfies_all(B, LEFT_ZERO).holds for B in dec.blocks)
            rect = all(satisfies_identity(B, RECTANGULAR).holds for B in dec.blocks)
            census.rows.append(
                CensusRow(
                    tuple(A.flat("mul").tolist()),
                    satisfies_identity(A, LEFT_REGULAR).holds,
                    member,
                    rect,
                )
            )
    return census


# -- congruence properties of lz-sums --------------------------------------


def lemma_violations(A: FiniteAlgebra, t: Term | None = None) -> tuple[int, int, int]:
    """(congruences, three-permutability failures, block-transfer failures)
    for one algebra, computed with the library's congruence routines."""
    t = t if t is not None else App("mul", (Var("x"), Var("y")))
    rho = semilattice_replica(A)
    congs = all_congruences(A)
    perm = sum(not check_three_permutability(A, th, rho) for th in congs)
    transfer = sum(block_transfer_violation(A, th, rho, t) is not None for th in congs)
    return len(congs), perm, transfer


@dataclass
class LemmaScan:
    algebras: int = 0
    congruences: int = 0
    three_perm_violations: int = 0
    transfer_violations: int = 0
    uncertified: int = 0
    first_bad: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.three_perm_violations or self.transfer_violations or self.uncertified)


def lz_lemma_scan(max_total: int, min_total: int = 1) -> LemmaScan:
    """Scan every lz-sum of total size in [min_total, max_total] over every
    semilattice (up to isomorphism) with the compiled lemma checker."""
    if max_total > 5:
        raise SizeLimitError("lemma scan limited to total size 5")
    scan = LemmaScan()
    parts = {n: _kernels.set_partitions(n) for n in range(1, max_total + 1)}
    for k in range(1, max_total + 1):
        for S in semilattices(k):
            for sizes in itertools.product(range(1, max_total - k + 2), repeat=k):
                n = sum(sizes)
                if not min_total <= n <= max_total:
                    continue
                _, T0, cells = _lz_layout(S, sizes)
                cols = np.array(cells, dtype=np.int64).reshape(-1, 4)
                counts = np.zeros(5, dtype=np.int64)
                first_bad = np.full(1, -1, dtype=np.int64)
                _kernels.lz_sum_scan(
                    T0, cols[:, 0].copy(), cols[:, 1].copy(), cols[:, 2].copy(), cols[:, 3].copy(),
                    n, parts[n], counts, first_bad,
                )
                scan.algebras += int(counts[0])
                scan.congruences += int(counts[1])
                scan.three_perm_violations += int(counts[2])
                scan.transfer_violations += int(counts[3])
                scan.uncertified += int(counts[4])
                if first_bad[0] >= 0:
                    scan.first_bad.append((S.key(), sizes, int(first_bad[0])))
    return scan


# -- random corpora --------------------------------------------------------


def _small_semilattices(max_n: int) -> list[FiniteAlgebra]:
    out = []
    for n in range(1, max_n + 1):
        out.extend(semilattices(n))
    return out


def random_block_sizes(rng: np.random.Generator, k: int, max_total: int) -> list[int]:
    sizes = [1] * k
    for _ in range(int(rng.integers(0, max_total - k + 1))):
        sizes[int(rng.integers(0, k))] += 1
    return sizes


def random_commutative_sum(rng: np.random.Generator, max_total: int = 6) -> FiniteAlgebra:
    """A random semilattice sum of random commutative groupoids."""
    pool = [S for S in _small_semilattice_cache(3) if S.size <= max_total]
    S = pool[int(rng.integers(0, len(pool)))]
    sizes = random_block_sizes(rng, S.size, max_total)
    n, T0, cells = _lz_layout(S, sizes)
    offs = [0] + list(itertools.accumulate(sizes))
    T = T0.copy()
    for s, m in enumerate(sizes):
        block = rng.integers(0, m, size=(m, m))
        block = np.triu(block) + np.triu(block, 1).T
        T[offs[s] : offs[s + 1], offs[s] : offs[s + 1]] = offs[s] + block
    for a, b, start, size in cells:
        T[a, b] = start + int(rng.integers(0, size))
    return FiniteAlgebra(GROUPOID, n, {"mul": T})


_SL_CACHE: dict[int, list[FiniteAlgebra]] = {}


def _small_semilattice_cache(max_n: int) -> list[FiniteAlgebra]:
    if max_n not in _SL_CACHE:
        _SL_CACHE[max_n] = _small_semilattices(max_n)
    return _SL_CACHE[max_n]


PLONKA_SIGNATURES = {
    "mul": GROUPOID,
    "lz-rz": Signature((("f", 2), ("g", 2))),
    "mul-u": Signature((("mul", 2), ("u", 1))),
}


def _projection_algebra(sig: Signature, n: int, rng: np.random.Generator) -> FiniteAlgebra:
    # the first binary symbol is a left projection, any other binary symbol a
    # right projection, unary symbols are random
    tables = {}
    first = True
    for sym, k in sig:
        idx = np.indices((n,) * k) if k else None
        if k == 2:
            tables[sym] = idx[0] if first else idx[1]
            first = False
        elif k == 1:
            tables[sym] = rng.integers(0, n, size=n)
        else:
            raise ValueError("only unary and binary symbols are supported")
    return FiniteAlgebra(sig, n, tables)


def _random_hom(A: FiniteAlgebra, B: FiniteAlgebra, rng, tries: int = 200):
    from .algebra import is_homomorphism

    for _ in range(tries):
        f = tuple(int(v) for v in rng.integers(0, B.size, size=A.size))
        if is_homomorphism(A, B, f):
            return f
    return None


def random_plonka_system(rng: np.random.Generator, max_total: int = 6, kind: str = "mul"):
    """A random Plonka system over a semilattice of size at most 3 whose
    summands satisfy t(x, y) = x for the canonical binary term t."""
    from .sums import PlonkaSystem, semilattice_order

    sig = PLONKA_SIGNATURES[kind]
    pool = [S for S in _small_semilattice_cache(3) if S.size <= max_total]
    while True:
        S0 = pool[int(rng.integers(0, len(pool)))]
        T = S0.table("mul")
        S = FiniteAlgebra(
            sig,
            S0.size,
            {sym: (T if k == 2 else np.arange(S0.size)) for sym, k in sig},
        )
        sizes = random_block_sizes(rng, S.size, max_total)
        summands = [_projection_algebra(sig, m, rng) for m in sizes]
        ge = semilattice_order(S)
        k = S.size
        covers = [
            (r, s)
            for r in range(k)
            for s in range(k)
            if r != s and ge[r, s] and not any(u not in (r, s) and ge[r, u] and ge[u, s] for u in range(k))
        ]
        maps = {}
        for r, s in covers:
            f = _random_hom(summands[r], summands[s], rng)
            if f is None:
                break
            maps[(r, s)] = f
        else:
            # close under composition, walking down from each element
            changed = True
            while changed:
                changed = False
                for (r, s), f in list(maps.items()):
                    for (s2, u), g in list(maps.items()):
                        if s2 == s and (r, u) not in maps:
                            maps[(r, u)] = tuple(g[v] for v in f)
                            changed = True
            sys = PlonkaSystem(S, summands, maps)
            try:
                sys.validate()
            except Exception:
                continue
            return sys


# -- Steiner-type census ---------------------------------------------------


@dataclass
class SteinerReport:
    rows: list[tuple[int, int, int, list[str]]]

    def text(self) -> str:
        lines = []
        for n, matching, regular, misses in self.rows:
            lines.append(f"n={n}: x(y.yz)=(xy.y)z models={matching} also x(x.yz)=(x.xy)z={regular}")
            for m in misses:
                lines.append(f"  fails x(x.yz)=(x.xy)z: {m}")
        return "\n".join(lines) + "\n"


def steiner_search(max_n: int = 4) -> SteinerReport:
    """Commutative idempotent groupoids (up to isomorphism) satisfying
    x(y.yz) = (xy.y)z, tested against x(x.yz) = (x.xy)z."""
    if max_n > 4:
        raise SizeLimitError("Steiner search limited to size 4")
    weak = _ident("(mul x (mul y (mul y z))) = (mul (mul (mul x y) y) z)")
    strong = _ident("(mul x (mul x (mul y z))) = (mul (mul x (mul x y)) z)")
    rows = []
    for n in range(1, max_n + 1):
        spec = SearchSpec(GROUPOID, [n], AxiomSet("weak", GROUPOID, (weak,)), "commutative-idempotent", "iso")
        models = list(enumerate_models(spec))
        misses = []
        for A in models:
            v = satisfies_identity(A, strong)
            if not v.holds:
                misses.append(f"table {A.flat('mul').tolist()} at {v.witness_text()}")
        rows.append((n, len(models), len(models) - len(misses), misses))
    return SteinerReport(rows)


# -- prolongation diagnostic -----------------------------------------------


def prolongation_diagnostic(n: int = 3, max_m: int = 3, depth: int = 2):
    """Compare a bounded prolongation of x.y = x with membership in LZ o S
    over all n-element groupoids; returns the two discrepancy lists."""
    base = prolong_set(LEFT_ZERO, max_m, depth).identities
    only_prolong, only_member = [], []
    idem = _ident("(mul x x) = x")
    for cells in itertools.product(range(n), repeat=n * n):
        A = FiniteAlgebra(GROUPOID, n, {"mul": np.array(cells).reshape(n, n)})
        # members are idempotent: so are their blocks and their quotient
        member = satisfies_identity(A, idem).holds and in_product_with_S(A, LEFT_ZERO).holds
        sat = first_failing_identity(A, base) is None
        if sat and not member:
            only_prolong.append(cells)
        elif member and not sat:
            only_member.append(cells)
    return only_prolong, only_member
