"""Semilattice sums built from their parts.

Order convention on an Omega-semilattice S: ``r >= s`` iff ``r . s == s``
for the canonical binary term of the signature.  Sums are numbered by
summand (in S's element order), then by local element.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import FiniteAlgebra, eval, is_homomorphism, parse_ualg, satisfies_all
from .congruence import Congruence
from .equations import canonical_binary, semilattice_base
from .errors import ConstructionError, ParseError, SignatureError, SizeLimitError
from .maltsev import Decomposition, decompose
from .terms import Signature, parse_signature, strip_comment, variables_of


def semilattice_order(S: FiniteAlgebra) -> np.ndarray:
    """Boolean matrix ``ge[r, s]`` meaning r >= s."""
    t = canonical_binary(S.signature)
    x, y = variables_of(t)
    n = S.size
    ge = np.zeros((n, n), dtype=bool)
    for r in range(n):
        for s in range(n):
            ge[r, s] = eval(S, t, {x: r, y: s}) == s
    return ge


def _meet(S: FiniteAlgebra):
    t = canonical_binary(S.signature)
    x, y = variables_of(t)
    return lambda r, s: eval(S, t, {x: r, y: s})


def _require_semilattice(S: FiniteAlgebra):
    v = satisfies_all(S, semilattice_base(S.signature))
    if not v.holds:
        raise ConstructionError(f"S is not a semilattice: fails {v.formula} at {v.witness_text()}", v.witness)


def _offsets(summands: Sequence[FiniteAlgebra]) -> list[int]:
    return [0] + list(itertools.accumulate(A.size for A in summands))


def _sum_decomposition(S, summands, algebra) -> Decomposition:
    offs = _offsets(summands)
    elements = [tuple(range(offs[s], offs[s + 1])) for s in range(S.size)]
    rho = Congruence.from_partition(offs[-1], elements)
    return Decomposition(rho, S, list(summands), elements)


# -- Plonka sums -----------------------------------------------------------


@dataclass
class PlonkaSystem:
    S: FiniteAlgebra
    summands: list[FiniteAlgebra]
    # (r, s) with r >= s  ->  images of phi_{r,s}; identity maps may be omitted
    maps: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)

    def phi(self, r: int, s: int) -> tuple[int, ...]:
        if (r, s) in self.maps:
            return tuple(self.maps[(r, s)])
        if r == s:
            return tuple(range(self.summands[r].size))
        raise ConstructionError(f"missing map {r} -> {s}", (r, s))

    def validate(self) -> None:
        S, summands = self.S, self.summands
        if len(summands) != S.size:
            raise ConstructionError("need exactly one summand per element of S")
        for A in summands:
            if A.signature != S.signature:
                raise SignatureError("summands and S must share a signature")
        _require_semilattice(S)
        ge = semilattice_order(S)
        for (r, s) in self.maps:
            if not ge[r, s]:
                raise ConstructionError(f"map {r} -> {s} but not {r} >= {s}", (r, s))
        for r in range(S.size):
            for s in range(S.size):
                if not ge[r, s]:
                    continue
                f = self.phi(r, s)
                if len(f) != summands[r].size or any(not 0 <= v < summands[s].size for v in f):
                    raise ConstructionError(f"map {r} -> {s} has the wrong shape", (r, s))
                if r == s and f != tuple(range(summands[r].size)):
                    raise ConstructionError(f"map {r} -> {r} is not the identity", (r, s))
                if not is_homomorphism(summands[r], summands[s], f):
                    raise ConstructionError(f"map {r} -> {s} is not a homomorphism", (r, s))
        for r, s, u in itertools.product(range(S.size), repeat=3):
            if ge[r, s] and ge[s, u]:
                f, g, h = self.phi(r, s), self.phi(s, u), self.phi(r, u)
                if any(g[f[a]] != h[a] for a in range(summands[r].size)):
                    raise ConstructionError(f"maps not functorial on {r} >= {s} >= {u}", (r, s, u))


def plonka_sum(sys: PlonkaSystem) -> tuple[FiniteAlgebra, Decomposition]:
    sys.validate()
    S, summands = sys.S, sys.summands
    offs = _offsets(summands)
    n = offs[-1]
    owner = [s for s in range(S.size) for _ in range(summands[s].size)]
    local = [a - offs[owner[a]] for a in range(n)]
    ge = semilattice_order(S)
    phi = {(r, s): sys.phi(r, s) for r in range(S.size) for s in range(S.size) if ge[r, s]}
    tables = {}
    for sym, k in S.signature:
        T = np.zeros((n,) * k, dtype=np.int64)
        for args in itertools.product(range(n), repeat=k):
            s = S.apply(sym, *(owner[a] for a in args))
            images = tuple(phi[(owner[a], s)][local[a]] for a in args)
            T[args] = offs[s] + summands[s].apply(sym, *images)
        tables[sym] = T
    A = FiniteAlgebra(S.signature, n, tables)
    return A, _sum_decomposition(S, summands, A)


# -- Lallement sums (binary type) ------------------------------------------


def _require_binary(sig: Signature):
    if any(k != 2 for _, k in sig):
        raise SignatureError("Lallement sums are defined here for binary operations only")


@dataclass
class LallementData:
    S: FiniteAlgebra
    summands: list[FiniteAlgebra]
    # (star, s, t) with s >= t  ->  images of phi^star_{s,t} in E^star_t
    maps: dict[tuple[str, int, int], tuple[int, ...]]
    # (star, s) -> single-operation extension of A_s's star-reduct; A_s is
    # embedded as its first |A_s| elements.  Missing means E = A_s.
    extensions: dict[tuple[str, int], FiniteAlgebra] = field(default_factory=dict)

    def extension(self, star: str, s: int) -> np.ndarray:
        E = self.extensions.get((star, s))
        if E is None:
            return self.summands[s].table(star)
        return E.table(E.signature.names[0])

    def phi(self, star: str, s: int, t: int) -> tuple[int, ...]:
        key = (star, s, t)
        if key in self.maps:
            return tuple(self.maps[key])
        if s == t:
            return tuple(range(self.summands[s].size))
        raise ConstructionError(f"missing map {star}: {s} -> {t}", key)

    @property
    def strict(self) -> bool:
        return all(
            self.extension(star, s).shape[0] == self.summands[s].size
            for star in self.S.signature.names
            for s in range(self.S.size)
        )

    def validate(self) -> None:
        S, summands = self.S, self.summands
        _require_binary(S.signature)
        if len(summands) != S.size:
            raise ConstructionError("need exactly one summand per element of S")
        _require_semilattice(S)
        ge = semilattice_order(S)
        meet = _meet(S)
        for star in S.signature.names:
            for s in range(S.size):
                E = self.extension(star, s)
                m = summands[s].size
                if not np.array_equal(E[:m, :m], summands[s].table(star)):
                    raise ConstructionError(f"extension {star} at {s} does not contain A_{s}", (star, s))
            for s in range(S.size):
                for t in range(S.size):
                    if not ge[s, t]:
                        continue
                    f = np.array(self.phi(star, s, t), dtype=np.int64)
                    E = self.extension(star, t)
                    if f.shape != (summands[s].size,) or (f < 0).any() or (f >= E.shape[0]).any():
                        raise ConstructionError(f"map {star}: {s} -> {t} has the wrong shape", (star, s, t))
                    if s == t and not np.array_equal(f, np.arange(summands[s].size)):
                        raise ConstructionError(f"map {star}: {s} -> {s} is not the embedding", (star, s, t))
                    if not np.array_equal(f[summands[s].table(star)], E[np.ix_(f, f)]):
                        raise ConstructionError(f"map {star}: {s} -> {t} is not a {star}-homomorphism", (star, s, t))
            for s in range(S.size):
                for t in range(S.size):
                    st = meet(s, t)
                    E = self.extension(star, st)
                    fs, ft = self.phi(star, s, st), self.phi(star, t, st)
                    for a in range(summands[s].size):
                        for b in range(summands[t].size):
                            c = int(E[fs[a], ft[b]])
                            if c >= summands[st].size:
                                raise ConstructionError(
                                    f"images multiply outside A_{st}: {star} at a={a} in A_{s}, b={b} in A_{t}",
                                    (star, s, a, t, b),
                                )
                            for u in range(S.size):
                                if not ge[st, u]:
                                    continue
                                Eu = self.extension(star, u)
                                lhs = self.phi(star, st, u)[c]
                                rhs = int(Eu[self.phi(star, s, u)[a], self.phi(star, t, u)[b]])
                                if lhs != rhs:
                                    raise ConstructionError(
                                        f"coherence fails for {star} at a={a} in A_{s}, b={b} in A_{t}, u={u}",
                                        (star, s, a, t, b, u),
                                    )


def lallement_sum(data: LallementData) -> tuple[FiniteAlgebra, Decomposition, bool]:
    """The semilattice sum by the maps of ``data``; the flag reports strictness."""
    data.validate()
    S, summands = data.S, data.summands
    meet = _meet(S)
    offs = _offsets(summands)
    n = offs[-1]
    owner = [s for s in range(S.size) for _ in range(summands[s].size)]
    tables = {}
    for star in S.signature.names:
        T = np.zeros((n, n), dtype=np.int64)
        for a in range(n):
            for b in range(n):
                s, t = owner[a], owner[b]
                st = meet(s, t)
                E = data.extension(star, st)
                c = E[data.phi(star, s, st)[a - offs[s]], data.phi(star, t, st)[b - offs[t]]]
                T[a, b] = offs[st] + c
        tables[star] = T
    A = FiniteAlgebra(S.signature, n, tables)
    return A, _sum_decomposition(S, summands, A), data.strict


def plonka_as_lallement(sys: PlonkaSystem) -> LallementData:
    _require_binary(sys.S.signature)
    ge = semilattice_order(sys.S)
    maps = {}
    for star in sys.S.signature.names:
        for s in range(sys.S.size):
            for t in range(sys.S.size):
                if ge[s, t]:
                    maps[(star, s, t)] = sys.phi(s, t)
    return LallementData(sys.S, list(sys.summands), maps)


# -- strict Lallement sums from right units --------------------------------


def find_right_units(A: FiniteAlgebra, star: str) -> list[int]:
    T = A.table(star)
    return [e for e in range(A.size) if np.array_equal(T[:, e], np.arange(A.size))]


def _check_units(summands, units, stars):
    for star in stars:
        for s, A in enumerate(summands):
            if (star, s) not in units:
                raise ConstructionError(f"no unit for {star} in summand {s}", (star, s))
            e = units[(star, s)]
            if e not in find_right_units(A, star):
                raise ConstructionError(f"{e} is not a right unit of {star} in summand {s}", (star, s, e))


def const_violation(A: FiniteAlgebra, dec: Decomposition, units: Mapping[tuple[str, int], int]):
    """First (star, a, b, e_u) breaking (a*b)*e_u = (a*e_u)*(b*e_u) for
    u below both blocks, in global labels; None when it holds."""
    S = dec.quotient
    ge = semilattice_order(S)
    owner = {a: i for i, elems in enumerate(dec.elements) for a in elems}
    for star in A.signature.names:
        T = A.table(star)
        for a in range(A.size):
            for b in range(A.size):
                s, t = owner[a], owner[b]
                for u in range(S.size):
                    if not (ge[s, u] and ge[t, u]):
                        continue
                    e = dec.elements[u][units[(star, u)]]
                    if T[T[a, b], e] != T[T[a, e], T[b, e]]:
                        return star, a, b, e
    return None


def strict_lallement_from_units(
    S: FiniteAlgebra,
    summands: Sequence[FiniteAlgebra],
    units: Mapping[tuple[str, int], int],
    cross: Mapping[tuple[str, int, int], Sequence[int]],
) -> tuple[FiniteAlgebra, Decomposition]:
    """Strict Lallement sum with maps a -> a * e_t.

    ``cross[(star, s, t)]`` for t < s lists the values a * e^star_t in A_t
    (local labels) for every a in A_s.
    """
    _require_binary(S.signature)
    stars = S.signature.names
    _check_units(summands, units, stars)
    ge = semilattice_order(S)
    maps = {}
    for star in stars:
        for s in range(S.size):
            for t in range(S.size):
                if s == t:
                    maps[(star, s, t)] = tuple(range(summands[s].size))
                elif ge[s, t]:
                    if (star, s, t) not in cross:
                        raise ConstructionError(f"missing products {star}: A_{s} * e_{t}", (star, s, t))
                    maps[(star, s, t)] = tuple(int(v) for v in cross[(star, s, t)])
    A, dec, _ = lallement_sum(LallementData(S, list(summands), maps))
    bad = const_violation(A, dec, units)
    if bad is not None:
        raise ConstructionError(f"unit condition fails: {bad}", bad)
    return A, dec


def lallement_from_sum(A: FiniteAlgebra, units: Mapping[tuple[str, int], int], dec: Decomposition | None = None):
    """Rebuild ``A`` as a strict Lallement sum over its replica
    decomposition, returning the rebuilt algebra and the map from A's labels
    to the rebuilt numbering."""
    _require_binary(A.signature)
    dec = decompose(A) if dec is None else dec
    _check_units(dec.blocks, units, A.signature.names)
    bad = const_violation(A, dec, units)
    if bad is not None:
        raise ConstructionError(f"unit condition fails: {bad}", bad)
    ge = semilattice_order(dec.quotient)
    cross = {}
    for star in A.signature.names:
        T = A.table(star)
        for s, elems in enumerate(dec.elements):
            for t, telems in enumerate(dec.elements):
                if s != t and ge[s, t]:
                    e = telems[units[(star, t)]]
                    cross[(star, s, t)] = [telems.index(int(T[a, e])) for a in elems]
    B, bdec = strict_lallement_from_units(dec.quotient, dec.blocks, units, cross)
    relabel = [0] * A.size
    for s, elems in enumerate(dec.elements):
        for i, a in enumerate(elems):
            relabel[a] = bdec.elements[s][i]
    if not is_homomorphism(A, B, relabel):
        raise ConstructionError("rebuilt sum differs from the input algebra")
    return B, relabel


# -- free semilattices -----------------------------------------------------

FREE_LIMIT = 20


def free_semilattice(X: Sequence[str], signature: Signature | None = None):
    """Nonempty subsets of ``X`` under union, ordered by (size, position)."""
    X = list(dict.fromkeys(X))
    if not X:
        raise ValueError("need at least one generator")
    if len(X) > FREE_LIMIT:
        raise SizeLimitError(f"free semilattice limited to {FREE_LIMIT} generators")
    sig = signature or Signature((("mul", 2),))
    if not sig.plural:
        raise SignatureError("free semilattice needs a plural signature")
    subsets = [
        c for k in range(1, len(X) + 1) for c in itertools.combinations(range(len(X)), k)
    ]
    index = {frozenset(c): i for i, c in enumerate(subsets)}
    n = len(subsets)
    tables = {}
    for sym, k in sig:
        T = np.zeros((n,) * k, dtype=np.int64)
        for args in itertools.product(range(n), repeat=k):
            T[args] = index[frozenset().union(*(subsets[a] for a in args))]
        tables[sym] = T
    labels = [tuple(X[i] for i in c) for c in subsets]
    return FiniteAlgebra(sig, n, tables, "free-semilattice"), labels


# -- .sum files ------------------------------------------------------------

@dataclass
class SumFile:
    S: FiniteAlgebra
    summands: list[FiniteAlgebra]
    plonka_maps: dict[tuple[int, int], tuple[int, ...]]
    lallement_maps: dict[tuple[str, int, int], tuple[int, ...]]
    extensions: dict[tuple[str, int], FiniteAlgebra]
    units: dict[tuple[str, int], int]

    def plonka_system(self) -> PlonkaSystem:
        return PlonkaSystem(self.S, self.summands, self.plonka_maps)

    def lallement_data(self) -> LallementData:
        maps = dict(self.lallement_maps)
        if not maps and self.plonka_maps:
            return plonka_as_lallement(self.plonka_system())
        return LallementData(self.S, self.summands, maps, self.extensions)


def parse_sum(text: str) -> SumFile:
    """Parse a ``.sum`` file.

    Layout: a signature block, ``algebra`` block for S, then
    ``summand s`` followed by an algebra block, ``map r s : images``,
    ``map[star] s t : images``, ``unit[star] s = e`` and
    ``extension[star] s`` followed by an algebra block in a one-symbol
    signature.
    """
    lines = text.splitlines()
    sig = None
    S = None
    summands: dict[int, FiniteAlgebra] = {}
    pmaps, lmaps, exts, units = {}, {}, {}, {}
    i = 0

    def grab_block(start):
        j = start
        while j < len(lines) and strip_comment(lines[j]).split() != ["end"]:
            j += 1
        if j == len(lines):
            raise ParseError("block without 'end'", start + 1)
        return "\n".join(lines[start : j + 1]), j + 1

    while i < len(lines):
        words = strip_comment(lines[i]).split()
        lineno = i + 1
        if not words:
            i += 1
            continue
        head = words[0]
        if head == "signature":
            block, i = grab_block(i)
            sig = parse_signature("\n".join(block.splitlines()[1:-1]))
        elif head == "algebra":
            if sig is None:
                raise ParseError("algebra before signature", lineno)
            block, i = grab_block(i)
            S = parse_ualg(block, sig)[0]
        elif head == "summand":
            if len(words) != 2 or sig is None:
                raise ParseError("expected 'summand s' after a signature", lineno)
            s = int(words[1])
            nxt = i + 1
            while nxt < len(lines) and not strip_comment(lines[nxt]).split():
                nxt += 1
            block, i = grab_block(nxt)
            summands[s] = parse_ualg(block, sig)[0]
        elif head.startswith("extension["):
            star = head[len("extension[") : -1]
            s = int(words[1])
            nxt = i + 1
            block, i = grab_block(nxt)
            exts[(star, s)] = parse_ualg(block, Signature(((star, 2),)))[0]
        elif head == "map" or head.startswith("map["):
            if ":" not in words:
                raise ParseError("map line needs ':'", lineno)
            colon = words.index(":")
            r, s = (int(w) for w in words[1:colon])
            images = tuple(int(w) for w in words[colon + 1 :])
            if head == "map":
                pmaps[(r, s)] = images
            else:
                lmaps[(head[4:-1], r, s)] = images
            i += 1
        elif head.startswith("unit["):
            if len(words) != 4 or words[2] != "=":
                raise ParseError("expected 'unit[star] s = e'", lineno)
            units[(head[5:-1], int(words[1]))] = int(words[3])
            i += 1
        else:
            raise ParseError(f"unexpected {head!r}", lineno)
    if S is None:
        raise ParseError("no algebra block for S")
    if sorted(summands) != list(range(S.size)):
        raise ParseError("need one summand per element of S")
    return SumFile(S, [summands[s] for s in range(S.size)], pmaps, lmaps, exts, units)
