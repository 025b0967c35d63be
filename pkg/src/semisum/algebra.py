"""Finite algebras stored as operation tables.

The carrier of an algebra of size n is ``{0, ..., n-1}`` and the table of a
k-ary symbol is an integer array of shape ``(n,) * k``; its row-major
flattening is the on-disk layout.  Satisfaction of identities and
quasi-identities is decided by exhaustive assignment, lexicographic with the
first variable (in first-occurrence order) most significant, so the reported
counterexample is always the least one.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .equations import AxiomSet, Formula, Identity, QuasiIdentity
from .errors import (
    BudgetExceeded,
    NotACongruenceError,
    ParseError,
    SignatureError,
    SizeLimitError,
    UnboundVariableError,
)
from .terms import App, Signature, Term, Var, parse_signature, strip_comment, variables_of

DEFAULT_BUDGET = 10**8
# assignment spaces below this size are cheaper on the numpy path
JIT_MIN_SPACE = 1 << 12
_CHUNK = 1 << 18


class FiniteAlgebra:
    """An algebra on ``range(size)`` with one total table per symbol."""

    __slots__ = ("signature", "size", "name", "_tables", "_hash")

    def __init__(self, signature: Signature, size: int, tables: Mapping[str, object], name: str = ""):
        if size < 1:
            raise ValueError("an algebra needs at least one element")
        self.signature = signature
        self.size = int(size)
        self.name = name
        out = {}
        for sym, k in signature:
            if sym not in tables:
                raise ParseError(f"missing table for {sym}")
            arr = np.asarray(tables[sym], dtype=np.int64)
            if arr.size != size**k:
                raise ParseError(f"table {sym} has {arr.size} entries, expected {size ** k}")
            arr = arr.reshape((size,) * k).copy()
            if arr.size and (arr.min() < 0 or arr.max() >= size):
                raise ParseError(f"table {sym} has an entry outside 0..{size - 1}")
            arr.setflags(write=False)
            out[sym] = arr
        extra = set(tables) - set(signature.names)
        if extra:
            raise ParseError(f"tables for unknown symbols {sorted(extra)}")
        self._tables = out
        self._hash = None

    def table(self, sym: str) -> np.ndarray:
        return self._tables[sym]

    def flat(self, sym: str) -> np.ndarray:
        return self._tables[sym].reshape(-1)

    @property
    def tables(self) -> dict[str, np.ndarray]:
        return dict(self._tables)

    def apply(self, sym: str, *args: int) -> int:
        return int(self._tables[sym][tuple(args)])

    def key(self) -> tuple:
        return tuple(tuple(self.flat(s).tolist()) for s in self.signature.names)

    def __eq__(self, other):
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return (
            self.signature == other.signature
            and self.size == other.size
            and all(np.array_equal(self._tables[s], other._tables[s]) for s in self.signature.names)
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.signature, self.size, self.key()))
        return self._hash

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<FiniteAlgebra{label} size={self.size} sig={self.signature.names}>"

    def renamed(self, name: str) -> "FiniteAlgebra":
        return FiniteAlgebra(self.signature, self.size, self._tables, name)


@dataclass
class Verdict:
    """Outcome of a satisfaction or membership check.

    ``witness`` maps variables to elements and is present exactly when the
    check failed; ``failed_formula`` indexes the formula in its axiom set.
    """

    holds: bool
    witness: dict[str, int] | None = None
    failed_formula: int | None = None
    formula: Formula | None = None
    block: int | None = None
    note: str = ""

    def __bool__(self):
        return self.holds

    def witness_text(self) -> str:
        if not self.witness:
            return ""
        return " ".join(f"{v}={e}" for v, e in self.witness.items())


# -- evaluation ------------------------------------------------------------


def eval(A: FiniteAlgebra, t: Term, asg: Mapping[str, int]) -> int:
    """Value of ``t`` in ``A`` under ``asg``."""
    if isinstance(t, Var):
        try:
            return int(asg[t.name])
        except KeyError:
            raise UnboundVariableError(f"no value for variable {t.name}") from None
    if t.symbol not in A.signature:
        raise SignatureError(f"unknown symbol {t.symbol}")
    args = tuple(eval(A, a, asg) for a in t.args)
    return int(A.table(t.symbol)[args])


class _GridEvaluator:
    """Vectorised evaluation of terms over a block of assignments."""

    def __init__(self, A: FiniteAlgebra, variables: Sequence[str], lo: int, hi: int):
        self.A = A
        n, k = A.size, len(variables)
        idx = np.arange(lo, hi, dtype=np.int64)
        cols = np.unravel_index(idx, (n,) * k) if k else ()
        self.env = {v: np.asarray(c, dtype=np.int64) for v, c in zip(variables, cols)}
        self.count = hi - lo
        self.memo: dict[Term, np.ndarray] = {}

    def __call__(self, t: Term) -> np.ndarray:
        got = self.memo.get(t)
        if got is not None:
            return got
        if isinstance(t, Var):
            try:
                val = self.env[t.name]
            except KeyError:
                raise UnboundVariableError(f"no value for variable {t.name}") from None
        elif not t.args:
            val = np.full(self.count, self.A.table(t.symbol)[()], dtype=np.int64)
        else:
            val = self.A.table(t.symbol)[tuple(self(a) for a in t.args)]
        self.memo[t] = val
        return val


@functools.lru_cache(maxsize=4096)
def _compile(sig: Signature, terms: tuple[Term, ...], variables: tuple[str, ...]):
    index = {name: i for i, name in enumerate(sig.names)}
    slot = {v: i for i, v in enumerate(variables)}
    prog: list[int] = []
    starts = [0]

    def emit(t):
        if isinstance(t, Var):
            prog.append(-slot[t.name] - 1)
        else:
            for a in t.args:
                emit(a)
            prog.append(index[t.symbol])

    for t in terms:
        emit(t)
        starts.append(len(prog))
    return np.array(prog, dtype=np.int64), np.array(starts, dtype=np.int64)


@functools.lru_cache(maxsize=256)
def _packed(A: FiniteAlgebra):
    flats = [A.flat(s) for s in A.signature.names]
    offs = np.cumsum([0] + [f.size for f in flats[:-1]]).astype(np.int64)
    tabs = np.concatenate(flats).astype(np.int64) if flats else np.zeros(0, np.int64)
    arity = np.array([k for _, k in A.signature], dtype=np.int64)
    return tabs, offs, arity


def _decode(index: int, n: int, variables: Sequence[str]) -> dict[str, int]:
    digits = []
    for _ in variables:
        digits.append(index % n)
        index //= n
    return {v: int(d) for v, d in zip(variables, reversed(digits))}


def _as_quasi(f: Formula) -> QuasiIdentity:
    return f if isinstance(f, QuasiIdentity) else QuasiIdentity((), f)


def _first_failure(A: FiniteAlgebra, q: QuasiIdentity, variables) -> int:
    n, k = A.size, len(variables)
    space = n**k
    if _kernels.USE_JIT and space >= JIT_MIN_SPACE:
        for t in q.terms():
            _check_symbols(A, t)
        prog, starts = _compile(A.signature, q.terms(), tuple(variables))
        tabs, offs, arity = _packed(A)
        return int(
            _kernels.first_failure(tabs, offs, arity, n, k, prog, starts, len(q.premises), 0, space)
        )
    for lo in range(0, space, _CHUNK):
        hi = min(space, lo + _CHUNK)
        ev = _GridEvaluator(A, variables, lo, hi)
        mask = np.ones(hi - lo, dtype=bool)
        for p in q.premises:
            mask &= ev(p.lhs) == ev(p.rhs)
        mask &= ev(q.conclusion.lhs) != ev(q.conclusion.rhs)
        if mask.any():
            return lo + int(np.argmax(mask))
    return -1


def _check_symbols(A: FiniteAlgebra, t: Term):
    if isinstance(t, App):
        if t.symbol not in A.signature:
            raise SignatureError(f"unknown symbol {t.symbol}")
        for a in t.args:
            _check_symbols(A, a)


def _budget_check(A: FiniteAlgebra, formulas: Iterable[Formula], budget: int | None):
    limit = DEFAULT_BUDGET if budget is None else budget
    total = sum(A.size ** len(f.variables) for f in formulas)
    if total > limit:
        raise BudgetExceeded(
            f"{total} assignments exceed the evaluation budget {limit} (size {A.size})"
        )


def satisfies_quasi(A: FiniteAlgebra, q: Formula, budget: int | None = None) -> Verdict:
    _budget_check(A, [q], budget)
    return _satisfies_quasi(A, q)


def _satisfies_quasi(A: FiniteAlgebra, q: Formula) -> Verdict:
    q = _as_quasi(q)
    variables = q.variables
    index = _first_failure(A, q, variables)
    if index < 0:
        return Verdict(True)
    return Verdict(False, _decode(index, A.size, variables), 0, q)


def satisfies_identity(A: FiniteAlgebra, id: Identity, budget: int | None = None) -> Verdict:
    v = satisfies_quasi(A, id, budget)
    if not v.holds:
        v.formula = id
    return v


def first_failing_identity(A: FiniteAlgebra, identities: Sequence[Identity]):
    """(index, witness) of the first identity failing in ``A``, or None."""
    if not identities:
        return None
    n = A.size
    if _kernels.USE_JIT:
        terms = tuple(itertools.chain.from_iterable(i.terms() for i in identities))
        key = (A.signature, terms)
        prog, starts, nvars, varlists = _batch_compile(*key)
        tabs, offs, arity = _packed(A)
        i, index = _kernels.first_failing_identity(tabs, offs, arity, n, prog, starts, nvars)
        if i < 0:
            return None
        return int(i), _decode(int(index), n, varlists[i])
    memo: dict[tuple, _GridEvaluator] = {}
    for i, id in enumerate(identities):
        variables = id.variables
        ev = memo.get(variables)
        if ev is None:
            ev = memo[variables] = _GridEvaluator(A, variables, 0, n ** len(variables))
        mask = ev(id.lhs) != ev(id.rhs)
        if mask.any():
            return i, _decode(int(np.argmax(mask)), n, variables)
    return None


@functools.lru_cache(maxsize=64)
def _batch_compile(sig: Signature, terms: tuple[Term, ...]):
    progs, starts, nvars, varlists = [], [0], [], []
    for j in range(0, len(terms), 2):
        pair = terms[j : j + 2]
        variables = tuple(dict.fromkeys(v for t in pair for v in variables_of(t)))
        p, s = _compile(sig, pair, variables)
        base = starts[-1]
        progs.append(p)
        starts += [base + int(s[1]), base + int(s[2])]
        nvars.append(len(variables))
        varlists.append(variables)
    prog = np.concatenate(progs) if progs else np.zeros(0, np.int64)
    return prog, np.array(starts, np.int64), np.array(nvars, np.int64), varlists


def satisfies_all(A: FiniteAlgebra, ax: AxiomSet | Sequence[Formula], budget: int | None = None) -> Verdict:
    formulas = ax.formulas() if isinstance(ax, AxiomSet) else tuple(ax)
    _budget_check(A, formulas, budget)
    identities = [f for f in formulas if isinstance(f, Identity)]
    small = all(A.size ** len(i.variables) < JIT_MIN_SPACE for i in identities)
    if small and len(identities) > 1:
        hit = first_failing_identity(A, identities)
        if hit is not None:
            i, witness = hit
            pos = formulas.index(identities[i])
            return Verdict(False, witness, pos, formulas[pos])
        rest = [(j, f) for j, f in enumerate(formulas) if not isinstance(f, Identity)]
    else:
        rest = list(enumerate(formulas))
    for j, f in rest:
        v = _satisfies_quasi(A, f)
        if not v.holds:
            v.failed_formula = j
            v.formula = f
            return v
    return Verdict(True)


# -- constructions ---------------------------------------------------------


def block_labels(size: int, partition) -> np.ndarray:
    """Least-element labels for a partition given as labels, blocks, or an
    object with a ``labels`` attribute."""
    labels = getattr(partition, "labels", partition)
    seq = list(labels)
    if seq and not isinstance(seq[0], (int, np.integer)):
        lab = np.full(size, -1, dtype=np.int64)
        for block in seq:
            block = sorted(block)
            for e in block:
                if lab[e] >= 0:
                    raise ValueError(f"element {e} in two blocks")
                lab[e] = block[0]
        if (lab < 0).any():
            raise ValueError("blocks do not cover the carrier")
        return lab
    arr = np.asarray(seq, dtype=np.int64)
    if arr.shape != (size,):
        raise ValueError("partition size does not match carrier")
    least = {}
    for i, v in enumerate(arr.tolist()):
        least.setdefault(v, i)
    return np.array([least[v] for v in arr.tolist()], dtype=np.int64)


def compatible(A: FiniteAlgebra, labels: np.ndarray) -> bool:
    """True iff the partition with least-element ``labels`` is a congruence."""
    for sym, k in A.signature:
        L = labels[A.table(sym)]
        for axis in range(k):
            if not np.array_equal(L, L.take(labels, axis=axis)):
                return False
    return True


def incompatible_witness(A: FiniteAlgebra, labels: np.ndarray):
    """(symbol, tuple u, tuple v) with u, v blockwise related and the images
    in different blocks, or None."""
    for sym, k in A.signature:
        T = A.table(sym)
        L = labels[T]
        for axis in range(k):
            bad = np.argwhere(L != L.take(labels, axis=axis))
            if len(bad):
                u = tuple(int(i) for i in bad[0])
                v = list(u)
                v[axis] = int(labels[u[axis]])
                return sym, u, tuple(v)
    return None


def quotient(A: FiniteAlgebra, theta) -> tuple[FiniteAlgebra, list[int]]:
    """A/theta with blocks ordered by least element, and the natural map."""
    labels = block_labels(A.size, theta)
    witness = incompatible_witness(A, labels)
    if witness is not None:
        raise NotACongruenceError("partition is not a congruence", witness)
    reps = sorted(set(labels.tolist()))
    pos = {r: i for i, r in enumerate(reps)}
    block_map = [pos[int(l)] for l in labels]
    bm = np.array(block_map, dtype=np.int64)
    rep_arr = np.array(reps, dtype=np.int64)
    tables = {}
    for sym, k in A.signature:
        T = A.table(sym)
        if k:
            T = T[np.ix_(*([rep_arr] * k))]
        tables[sym] = bm[T]
    B = FiniteAlgebra(A.signature, len(reps), tables, f"{A.name}/theta" if A.name else "")
    _assert_homomorphism(A, B, bm)
    return B, block_map


def is_homomorphism(A: FiniteAlgebra, B: FiniteAlgebra, f: Sequence[int]) -> bool:
    f = np.asarray(f, dtype=np.int64)
    for sym, k in A.signature:
        lhs = f[A.table(sym)]
        rhs = B.table(sym)[np.ix_(*([f] * k))] if k else B.table(sym)
        if not np.array_equal(lhs, rhs):
            return False
    return True


def _assert_homomorphism(A, B, f):
    if not is_homomorphism(A, B, f):  # pragma: no cover - guarded by compatibility
        raise AssertionError("natural map is not a homomorphism")


def generated_subuniverse(A: FiniteAlgebra, subset: Iterable[int]) -> tuple[int, ...]:
    current = set(int(a) for a in subset)
    for sym, k in A.signature:
        if k == 0:
            current.add(int(A.table(sym)[()]))
    while True:
        idx = np.array(sorted(current), dtype=np.int64)
        new = set(current)
        for sym, k in A.signature:
            if k and len(idx):
                new.update(np.unique(A.table(sym)[np.ix_(*([idx] * k))]).tolist())
        if new == current:
            return tuple(sorted(current))
        current = new


def restrict(A: FiniteAlgebra, subset: Iterable[int]) -> tuple[FiniteAlgebra, tuple[int, ...]]:
    """Subalgebra on ``subset`` renumbered by increasing label, with the
    list of original labels."""
    elems = tuple(sorted(set(int(a) for a in subset)))
    if not elems:
        raise ValueError("empty subset")
    if generated_subuniverse(A, elems) != elems:
        raise NotACongruenceError(f"subset {list(elems)} is not closed under the operations")
    pos = np.full(A.size, -1, dtype=np.int64)
    pos[list(elems)] = np.arange(len(elems))
    idx = np.array(elems, dtype=np.int64)
    tables = {}
    for sym, k in A.signature:
        T = A.table(sym)
        tables[sym] = pos[T[np.ix_(*([idx] * k))] if k else T]
    return FiniteAlgebra(A.signature, len(elems), tables), elems


def direct_product(A: FiniteAlgebra, B: FiniteAlgebra) -> FiniteAlgebra:
    """Componentwise product; the pair (a, b) is element ``a * |B| + b``."""
    if A.signature != B.signature:
        raise SignatureError("signature mismatch")
    nA, nB = A.size, B.size
    tables = {}
    for sym, k in A.signature:
        grid = np.indices((nA * nB,) * k).reshape(k, -1) if k else np.zeros((0, 1), np.int64)
        a_idx = tuple(grid // nB)
        b_idx = tuple(grid % nB)
        tables[sym] = A.table(sym)[a_idx] * nB + B.table(sym)[b_idx]
    return FiniteAlgebra(A.signature, nA * nB, tables)


def relabel(A: FiniteAlgebra, perm: Sequence[int]) -> FiniteAlgebra:
    """The isomorphic copy of ``A`` in which element a is called perm[a]."""
    p = np.asarray(perm, dtype=np.int64)
    inv = np.argsort(p)
    tables = {}
    for sym, k in A.signature:
        T = p[A.table(sym)]
        tables[sym] = T[np.ix_(*([inv] * k))] if k else T
    return FiniteAlgebra(A.signature, A.size, tables, A.name)


ISO_LIMIT = 6
CANON_LIMIT = 5


def is_isomorphic(A: FiniteAlgebra, B: FiniteAlgebra) -> bool:
    if A.signature != B.signature:
        raise SignatureError("signature mismatch")
    if A == B:
        return True
    if max(A.size, B.size) > ISO_LIMIT:
        raise SizeLimitError(f"isomorphism test limited to size {ISO_LIMIT}")
    if A.size != B.size:
        return False
    for perm in itertools.permutations(range(A.size)):
        if is_homomorphism(A, B, perm):
            return True
    return False


def canonical_form(A: FiniteAlgebra) -> tuple:
    """Lexicographically least table tuple over all relabelings."""
    if A.size > CANON_LIMIT:
        raise SizeLimitError(f"canonical form limited to size {CANON_LIMIT}")
    best = None
    for perm in itertools.permutations(range(A.size)):
        key = relabel(A, perm).key()
        if best is None or key < best:
            best = key
    return best


# -- .ualg files -----------------------------------------------------------


def parse_ualg(text: str, signature: Signature | None = None) -> list[FiniteAlgebra]:
    """Parse every algebra in a ``.ualg`` document."""
    lines = [(i + 1, strip_comment(l).split()) for i, l in enumerate(text.splitlines())]
    lines = [(i, w) for i, w in lines if w]
    out = []
    pos = 0
    sig = signature
    while pos < len(lines):
        lineno, words = lines[pos]
        head = words[0]
        if head == "signature" and len(words) == 1:
            body = []
            pos += 1
            while pos < len(lines) and lines[pos][1] != ["end"]:
                body.append(" ".join(lines[pos][1]))
                pos += 1
            if pos == len(lines):
                raise ParseError("signature block without 'end'", lineno)
            sig = parse_signature("\n".join(body))
            pos += 1
        elif head == "algebra":
            if sig is None:
                raise ParseError("algebra before any signature", lineno)
            name = words[1] if len(words) > 1 else ""
            alg, pos = _parse_algebra_block(lines, pos + 1, sig, name, lineno)
            out.append(alg)
        else:
            raise ParseError(f"unexpected {head!r}", lineno)
    return out


def _parse_algebra_block(lines, pos, sig, name, start):
    size = None
    tables: dict[str, list[int]] = {}
    current = None
    while pos < len(lines):
        lineno, words = lines[pos]
        if words == ["end"]:
            break
        if words[0] == "size":
            if len(words) != 2 or not words[1].isdigit():
                raise ParseError("malformed size line", lineno)
            size = int(words[1])
            current = None
        elif words[0] == "op":
            if len(words) != 2:
                raise ParseError("malformed op line", lineno)
            current = words[1]
            if current not in sig:
                raise ParseError(f"unknown symbol {current}", lineno)
            if current in tables:
                raise ParseError(f"duplicate table for {current}", lineno)
            tables[current] = []
        else:
            if current is None:
                raise ParseError(f"unexpected {words[0]!r}", lineno)
            try:
                tables[current].extend(int(w) for w in words)
            except ValueError:
                raise ParseError("non-integer table entry", lineno) from None
        pos += 1
    else:
        raise ParseError("algebra block without 'end'", start)
    if size is None:
        raise ParseError("algebra block without size", start)
    try:
        alg = FiniteAlgebra(sig, size, tables, name)
    except ParseError as exc:
        raise ParseError(str(exc), start) from None
    return alg, pos + 1


def format_algebra(A: FiniteAlgebra, name: str | None = None) -> str:
    name = A.name if name is None else name
    out = [f"algebra {name}".rstrip(), f"  size {A.size}"]
    for sym, k in A.signature:
        out.append(f"  op {sym}")
        flat = A.flat(sym).tolist()
        width = A.size if k else 1
        for i in range(0, len(flat), width):
            out.append("    " + " ".join(map(str, flat[i : i + width])))
    out.append("end")
    return "\n".join(out)


def format_ualg(algebras: Sequence[FiniteAlgebra]) -> str:
    if not algebras:
        return ""
    sig = algebras[0].signature
    parts = ["signature"] + ["  " + l for l in sig.text().splitlines()] + ["end"]
    for A in algebras:
        if A.signature != sig:
            raise SignatureError("algebras in one file must share a signature")
        parts.append(format_algebra(A))
    return "\n".join(parts) + "\n"


def load_ualg(path, signature: Signature | None = None) -> list[FiniteAlgebra]:
    with open(path, encoding="utf-8") as fh:
        return parse_ualg(fh.read(), signature)


def from_rows(sig: Signature, rows_by_symbol: Mapping[str, Sequence], name: str = "") -> FiniteAlgebra:
    """Build an algebra from nested lists; the size is read off the first
    table of positive arity."""
    size = None
    for sym, k in sig:
        if k:
            size = int(round(np.asarray(rows_by_symbol[sym]).size ** (1 / k)))
            break
    if size is None:
        raise SignatureError("cannot infer size without a symbol of positive arity")
    return FiniteAlgebra(sig, size, rows_by_symbol, name)
