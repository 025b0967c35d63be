"""Partitions and congruences of finite algebras.

A partition is stored as least-element labels: ``labels[a]`` is the least
element of the block containing ``a``.  The text form lists blocks in order
of their least element, e.g. ``{0,1|2,3|4,5|6}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from .algebra import (
    FiniteAlgebra,
    block_labels,
    compatible,
    eval,
    incompatible_witness,
    quotient,
    satisfies_all,
)
from .equations import semilattice_base
from .errors import ParseError, SizeLimitError

# Bell(7) = 877 partitions, still instant
ALL_CONGRUENCES_LIMIT = 7


@dataclass(frozen=True)
class Congruence:
    labels: tuple[int, ...]

    @classmethod
    def from_partition(cls, size: int, partition) -> "Congruence":
        return cls(tuple(int(v) for v in block_labels(size, partition)))

    @classmethod
    def identity(cls, size: int) -> "Congruence":
        return cls(tuple(range(size)))

    @classmethod
    def total(cls, size: int) -> "Congruence":
        return cls((0,) * size)

    @property
    def size(self) -> int:
        return len(self.labels)

    def blocks(self) -> list[tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for e, lab in enumerate(self.labels):
            out.setdefault(lab, []).append(e)
        return [tuple(out[k]) for k in sorted(out)]

    def block_of(self, a: int) -> tuple[int, ...]:
        lab = self.labels[a]
        return tuple(e for e, l in enumerate(self.labels) if l == lab)

    def relates(self, a: int, b: int) -> bool:
        return self.labels[a] == self.labels[b]

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.size) for b in range(a + 1, self.size) if self.relates(a, b)]

    def matrix(self) -> np.ndarray:
        lab = np.array(self.labels)
        return lab[:, None] == lab[None, :]

    def __le__(self, other: "Congruence") -> bool:
        return all(other.relates(a, b) for a, b in self.pairs())

    def __lt__(self, other: "Congruence") -> bool:
        return self != other and self <= other

    def __len__(self):
        return len(self.blocks())

    def __str__(self):
        return "{" + "|".join(",".join(map(str, b)) for b in self.blocks()) + "}"


def parse_partition(text: str, size: int | None = None) -> Congruence:
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ParseError(f"partition must be enclosed in braces: {text!r}")
    blocks = []
    for chunk in body[1:-1].split("|"):
        try:
            blocks.append([int(e) for e in chunk.split(",") if e.strip()])
        except ValueError:
            raise ParseError(f"bad partition element in {text!r}") from None
    n = size if size is not None else 1 + max((e for b in blocks for e in b), default=-1)
    try:
        return Congruence.from_partition(n, blocks)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def is_congruence(A: FiniteAlgebra, p) -> bool:
    return compatible(A, block_labels(A.size, p))


class _UnionFind:
    def __init__(self, n: int):
        self.par = list(range(n))

    def find(self, a: int) -> int:
        par = self.par
        while par[a] != a:
            par[a] = par[par[a]]
            a = par[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra > rb:
            ra, rb = rb, ra
        self.par[rb] = ra
        return True

    def labels(self) -> np.ndarray:
        return np.array([self.find(a) for a in range(len(self.par))], dtype=np.int64)


def congruence_generated(A: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> Congruence:
    """Least congruence containing ``pairs``."""
    uf = _UnionFind(A.size)
    for a, b in pairs:
        uf.union(int(a), int(b))
    while True:
        labels = uf.labels()
        merged = False
        for sym, k in A.signature:
            T = A.table(sym)
            L = labels[T]
            for axis in range(k):
                Tt = T.take(labels, axis=axis)
                bad = np.nonzero(L != labels[Tt])
                for u, v in zip(T[bad].tolist(), Tt[bad].tolist()):
                    merged |= uf.union(u, v)
        if not merged:
            return Congruence(tuple(int(v) for v in uf.labels()))


def _check_carrier(*thetas: Congruence):
    if len({t.size for t in thetas}) != 1:
        raise ValueError("carrier mismatch")


def join(A: FiniteAlgebra, theta1: Congruence, theta2: Congruence) -> Congruence:
    _check_carrier(theta1, theta2)
    return congruence_generated(A, theta1.pairs() + theta2.pairs())


def meet(theta1: Congruence, theta2: Congruence) -> Congruence:
    _check_carrier(theta1, theta2)
    pairs = [(a, b) for a, b in theta1.pairs() if theta2.relates(a, b)]
    uf = _UnionFind(theta1.size)
    for a, b in pairs:
        uf.union(a, b)
    return Congruence(tuple(int(v) for v in uf.labels()))


def compose(r1, r2) -> np.ndarray:
    """Relational product ``r1 o r2`` as a boolean matrix: (a, c) is
    related iff a r1 b r2 c for some b."""
    m1 = r1.matrix() if isinstance(r1, Congruence) else np.asarray(r1, dtype=bool)
    m2 = r2.matrix() if isinstance(r2, Congruence) else np.asarray(r2, dtype=bool)
    if m1.shape != m2.shape:
        raise ValueError("carrier mismatch")
    return (m1.astype(np.int64) @ m2.astype(np.int64)) > 0


def semilattice_replica(A: FiniteAlgebra) -> Congruence:
    """Least congruence whose quotient is an Omega-semilattice.

    Starting from the identity partition, the least failing instance of the
    semilattice base in the current quotient names two classes that must
    coincide; they are merged and the partition is re-closed.
    """
    base = semilattice_base(A.signature)
    theta = Congruence.identity(A.size)
    while True:
        Q, block_map = quotient(A, theta)
        verdict = satisfies_all(Q, base)
        if verdict.holds:
            return theta
        f = verdict.formula
        u = eval(Q, f.lhs, verdict.witness)
        v = eval(Q, f.rhs, verdict.witness)
        ru, rv = block_map.index(u), block_map.index(v)
        theta = congruence_generated(A, theta.pairs() + [(ru, rv)])


def all_congruences(A: FiniteAlgebra) -> list[Congruence]:
    if A.size > ALL_CONGRUENCES_LIMIT:
        raise SizeLimitError(f"congruence enumeration limited to size {ALL_CONGRUENCES_LIMIT}")
    out = []
    for rgs in _kernels.set_partitions(A.size):
        labels = block_labels(A.size, rgs.tolist())
        if compatible(A, labels):
            out.append(Congruence(tuple(int(v) for v in labels)))
    return out


def violating_tuple(A: FiniteAlgebra, p):
    """First (symbol, u, v) showing ``p`` is not a congruence, or None."""
    return incompatible_witness(A, block_labels(A.size, p))
