"""Identities, quasi-identities and the axiom generators built from them.

Products ``x_1 . ... . x_n`` of a derived binary operation are always
bracketed to the left.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .errors import ParseError, SignatureError
from .terms import (
    App,
    Signature,
    Term,
    Var,
    check_term,
    enumerate_terms,
    parse_signature,
    parse_term,
    strip_comment,
    substitute,
    variables_of,
    variables_of_all,
)


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term
    label: str = field(default="", compare=False)

    @property
    def variables(self) -> tuple[str, ...]:
        return variables_of_all((self.lhs, self.rhs))

    def terms(self) -> tuple[Term, ...]:
        return (self.lhs, self.rhs)

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class QuasiIdentity:
    premises: tuple[Identity, ...]
    conclusion: Identity
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))

    @property
    def variables(self) -> tuple[str, ...]:
        return variables_of_all(self.terms())

    def terms(self) -> tuple[Term, ...]:
        out = []
        for p in self.premises:
            out += [p.lhs, p.rhs]
        return tuple(out) + (self.conclusion.lhs, self.conclusion.rhs)

    def __str__(self):
        if not self.premises:
            return str(self.conclusion)
        return " & ".join(map(str, self.premises)) + " -> " + str(self.conclusion)


Formula = Union[Identity, QuasiIdentity]


@dataclass(frozen=True)
class AxiomSet:
    name: str
    signature: Signature
    identities: tuple[Identity, ...] = ()
    quasi_identities: tuple[QuasiIdentity, ...] = ()
    # True for truncations of an infinite base
    fragment: bool = False

    def __post_init__(self):
        object.__setattr__(self, "identities", tuple(self.identities))
        object.__setattr__(self, "quasi_identities", tuple(self.quasi_identities))

    def formulas(self) -> tuple[Formula, ...]:
        return self.identities + self.quasi_identities

    def __len__(self):
        return len(self.identities) + len(self.quasi_identities)

    def __iter__(self):
        return iter(self.formulas())

    def text(self) -> str:
        lines = ["signature"]
        lines += ["  " + ln for ln in self.signature.text().splitlines()]
        lines.append("end")
        lines += [str(f) for f in self.formulas()]
        return "\n".join(lines) + "\n"


# -- parsing ---------------------------------------------------------------


def parse_identity(text: str, sig: Signature) -> Identity:
    sides = text.split("=")
    if len(sides) != 2:
        raise ParseError(f"expected exactly one '=' in {text.strip()!r}")
    lhs, rhs = (parse_term(s, sig) for s in sides)
    return Identity(lhs, rhs)


def parse_formula(text: str, sig: Signature) -> Formula:
    if "->" in text:
        head, _, concl = text.partition("->")
        if "->" in concl:
            raise ParseError("more than one '->'")
        parts = head.split("&")
        if any(not p.strip() for p in parts):
            raise ParseError("empty premise before '->'")
        premises = tuple(parse_identity(p, sig) for p in parts)
        return QuasiIdentity(premises, parse_identity(concl, sig))
    if "&" in text:
        raise ParseError("'&' outside the premises of a quasi-identity")
    return parse_identity(text, sig)


def parse_axioms(text: str, sig: Signature | None = None, name: str = "") -> AxiomSet:
    """Parse the ``.eq`` format.

    An optional ``signature ... end`` block comes first; without it ``sig``
    must be supplied.  Every further non-blank line is one formula.
    """
    lines = text.splitlines()
    idents, quasis = [], []
    i = 0
    while i < len(lines) and not strip_comment(lines[i]).strip():
        i += 1
    if i < len(lines) and strip_comment(lines[i]).split() == ["signature"]:
        start = i + 1
        i = start
        while i < len(lines) and strip_comment(lines[i]).split() != ["end"]:
            i += 1
        if i == len(lines):
            raise ParseError("signature block without 'end'", start)
        sig = parse_signature("\n".join(lines[start:i]))
        i += 1
    if sig is None:
        raise ParseError("no signature block and no signature supplied")
    for lineno in range(i, len(lines)):
        body = strip_comment(lines[lineno]).strip()
        if not body:
            continue
        if body.split()[0] == "name" and len(body.split()) == 2:
            name = body.split()[1]
            continue
        try:
            f = parse_formula(body, sig)
        except ParseError as exc:
            raise ParseError(str(exc), lineno + 1) from None
        (quasis if isinstance(f, QuasiIdentity) else idents).append(f)
    return AxiomSet(name, sig, tuple(idents), tuple(quasis))


# -- syntactic properties --------------------------------------------------


def is_regular(id: Identity) -> bool:
    return set(variables_of(id.lhs)) == set(variables_of(id.rhs))


def _as_binary(t: Term, x: str) -> Term | None:
    vs = variables_of(t)
    if len(vs) != 2 or x not in vs:
        return None
    other = vs[0] if vs[1] == x else vs[1]
    return substitute(t, {x: Var("x"), other: Var("y")})


def strongly_irregular_witnesses(ax: AxiomSet | Iterable[Identity]) -> list[Term]:
    """Terms t(x, y) with ``t(x,y) = x`` (or its mirror) literally in ``ax``."""
    identities = ax.identities if isinstance(ax, AxiomSet) else ax
    found: dict[Term, None] = {}
    for id in identities:
        for side, other in ((id.lhs, id.rhs), (id.rhs, id.lhs)):
            if isinstance(other, Var) and isinstance(side, App):
                t = _as_binary(side, other.name)
                if t is not None:
                    found.setdefault(t)
    return list(found)


def canonical_rename(id: Identity, prefix: str = "x") -> Identity:
    names = id.variables
    env = {v: Var(f"{prefix}{i}") for i, v in enumerate(names, 1)}
    return Identity(substitute(id.lhs, env), substitute(id.rhs, env), id.label)


# -- prolongation ----------------------------------------------------------


def prolong(id: Identity, m: int, depth: int, sig: Signature) -> list[Identity]:
    """The members of the m-th prolongation of ``id`` with term depth bounded.

    Each variable of ``id`` is replaced by a term of depth <= ``depth`` that
    uses exactly the variables x1..xm.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if depth < 0:
        raise ValueError("depth must be non-negative")
    ys = id.variables
    xs = [f"x{i}" for i in range(1, m + 1)]
    pool = enumerate_terms(sig, xs, depth, exact_vars=True)
    out: dict[Identity, None] = {}
    label = f"{id.label or id}"
    for rs in itertools.product(pool, repeat=len(ys)):
        env = dict(zip(ys, rs))
        inst = Identity(substitute(id.lhs, env), substitute(id.rhs, env))
        inst = canonical_rename(inst)
        out.setdefault(Identity(inst.lhs, inst.rhs, f"{label} [m={m}]"))
    return list(out)


def prolong_set(ax: AxiomSet, max_m: int, depth: int) -> AxiomSet:
    """Bounded fragment of the prolongation of ``ax.identities``."""
    if max_m < 1:
        raise ValueError("max_m must be positive")
    out: dict[Identity, None] = {}
    for id in ax.identities:
        for m in range(1, max_m + 1):
            for inst in prolong(id, m, depth, ax.signature):
                out.setdefault(inst)
    name = f"{ax.name or 'axioms'}^p[m<={max_m},depth<={depth}]"
    return AxiomSet(name, ax.signature, tuple(out), fragment=True)


# -- derived binary operations and axiom generators ------------------------


def canonical_binary(sig: Signature) -> Term:
    """omega(x, y, ..., y) for the first symbol of least arity >= 2."""
    if not sig.plural:
        raise SignatureError("canonical binary term needs a plural signature")
    k = min(a for _, a in sig if a >= 2)
    name = next(n for n, a in sig if a == k)
    return App(name, (Var("x"),) + (Var("y"),) * (k - 1))


def _check_binary_term(sig: Signature, t: Term) -> tuple[str, str]:
    check_term(t, sig)
    vs = variables_of(t)
    if len(vs) != 2:
        raise SignatureError(f"{t} does not use exactly two variables")
    return vs


class Dot:
    """The binary operation ``a . b := t(a, b)`` on terms."""

    def __init__(self, sig: Signature, t: Term):
        self.x, self.y = _check_binary_term(sig, t)
        self.t = t

    def __call__(self, a: Term, b: Term) -> Term:
        return substitute(self.t, {self.x: a, self.y: b})

    def product(self, factors: Sequence[Term]) -> Term:
        acc = factors[0]
        for f in factors[1:]:
            acc = self(acc, f)
        return acc


def _xs(n: int) -> list[Term]:
    return [Var(f"x{i}") for i in range(1, n + 1)]


def semilattice_base(sig: Signature) -> AxiomSet:
    dot = Dot(sig, canonical_binary(sig))
    x, y, z = Var("x"), Var("y"), Var("z")
    ids = [
        Identity(dot(x, x), x, "idempotent"),
        Identity(dot(x, y), dot(y, x), "commutative"),
        Identity(dot(x, dot(y, z)), dot(dot(x, y), z), "associative"),
    ]
    for name, k in sig:
        xs = _xs(k)
        ids.append(Identity(App(name, tuple(xs)), dot.product(xs), f"collapse[{name}]"))
    return AxiomSet("semilattice", sig, tuple(ids))


def plonka_axioms(sig: Signature, t: Term, pseudo: bool = False) -> AxiomSet:
    """(P1)-(P5) for ``x . y := t(x, y)``; (P1)-(P4) when ``pseudo``."""
    dot = Dot(sig, t)
    x, y, z = Var("x"), Var("y"), Var("z")
    ids = [
        Identity(dot(x, x), x, "P1"),
        Identity(dot(x, dot(y, z)), dot(dot(x, y), z), "P2"),
        Identity(dot(x, dot(y, z)), dot(x, dot(z, y)), "P3"),
    ]
    for name, k in sig:
        xs = _xs(k)
        ids.append(
            Identity(dot(y, App(name, tuple(xs))), dot.product([y] + xs), f"P4[{name}]")
        )
    if not pseudo:
        for name, k in sig:
            xs = _xs(k)
            ids.append(
                Identity(
                    dot(App(name, tuple(xs)), y),
                    App(name, tuple(dot(xi, y) for xi in xs)),
                    f"P5[{name}]",
                )
            )
    kind = "pseudo-plonka" if pseudo else "plonka"
    return AxiomSet(f"{kind}[{t}]", sig, tuple(ids))


def pseudo_plonka_axioms(sig: Signature, t: Term) -> AxiomSet:
    return plonka_axioms(sig, t, pseudo=True)


def quasi_regularization_quasi_identity(sig: Signature, t: Term) -> QuasiIdentity:
    dot = Dot(sig, t)
    x, y, z = Var("x"), Var("y"), Var("z")
    premises = (
        Identity(dot(x, y), x),
        Identity(dot(y, x), y),
        Identity(dot(x, z), z),
        Identity(dot(z, x), z),
        Identity(dot(y, z), z),
        Identity(dot(z, y), z),
    )
    return QuasiIdentity(premises, Identity(x, y), "quasi-regularization")


def commutative_sum_quasi_identity(sig: Signature, t: Term | None = None) -> QuasiIdentity:
    """(zx = x & zy = y & xz = yz) -> xy = yx, valid in every semilattice
    sum of commutative groupoids."""
    dot = Dot(sig, t if t is not None else canonical_binary(sig))
    x, y, z = Var("x"), Var("y"), Var("z")
    premises = (
        Identity(dot(z, x), x),
        Identity(dot(z, y), y),
        Identity(dot(x, z), dot(y, z)),
    )
    return QuasiIdentity(premises, Identity(dot(x, y), dot(y, x)), "cg-quasi")
