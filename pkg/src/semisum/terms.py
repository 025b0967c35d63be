"""Signatures, terms, s-expression syntax and bounded term enumeration.

Terms are immutable trees.  A variable has depth 0 and an application has
depth one more than its deepest argument.  Every enumeration in the package
orders terms depth-major, then lexicographically by printed form, so that
derived axiom sets are reproducible.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .errors import ParseError, SignatureError, UnboundVariableError

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_TOKEN_RE = re.compile(r"\(|\)|[A-Za-z_][A-Za-z0-9_]*|\S")


def strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


@dataclass(frozen=True)
class Signature:
    """Ordered operation symbols with arities."""

    symbols: tuple[tuple[str, int], ...]
    _arity: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        symbols = tuple((str(n), int(a)) for n, a in self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise SignatureError("empty signature")
        arity = {}
        for name, k in symbols:
            if not IDENT_RE.match(name):
                raise SignatureError(f"bad symbol name {name!r}")
            if k < 0:
                raise SignatureError(f"negative arity for {name}")
            if name in arity:
                raise SignatureError(f"duplicate symbol {name}")
            arity[name] = k
        object.__setattr__(self, "_arity", arity)

    @classmethod
    def of(cls, **arities: int) -> "Signature":
        return cls(tuple(arities.items()))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.symbols)

    @property
    def plural(self) -> bool:
        arities = [k for _, k in self.symbols]
        return 0 not in arities and max(arities) >= 2

    def arity(self, name: str) -> int:
        try:
            return self._arity[name]
        except KeyError:
            raise SignatureError(f"unknown symbol {name}") from None

    def __contains__(self, name) -> bool:
        return name in self._arity

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def text(self) -> str:
        return "\n".join(f"{n} {k}" for n, k in self.symbols)


def parse_signature(text: str) -> Signature:
    """Parse ``name arity`` lines (comments and blank lines allowed)."""
    symbols = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = strip_comment(raw).split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ParseError(f"expected 'name arity', got {raw.strip()!r}", lineno)
        name, arity = parts
        if not re.fullmatch(r"\d+", arity):
            raise ParseError(f"malformed arity {arity!r}", lineno)
        symbols.append((name, int(arity)))
    try:
        return Signature(tuple(symbols))
    except SignatureError as exc:
        raise ParseError(str(exc)) from None


class Term:
    __slots__ = ()

    depth: int
    text: str

    def __str__(self):
        return self.text

    def __lt__(self, other: "Term"):
        return (self.depth, self.text) < (other.depth, other.text)


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str

    @property
    def depth(self) -> int:
        return 0

    @property
    def text(self) -> str:
        return self.name

    def __repr__(self):
        return f"Var({self.name})"


@dataclass(frozen=True, slots=True)
class App(Term):
    symbol: str
    args: tuple[Term, ...]
    depth: int = field(init=False, compare=False, repr=False)
    text: str = field(init=False, compare=False, repr=False)
    _hash: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        args = tuple(self.args)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "depth", 1 + max((a.depth for a in args), default=-1))
        if args:
            text = "(" + self.symbol + " " + " ".join(a.text for a in args) + ")"
        else:
            text = self.symbol
        object.__setattr__(self, "text", text)
        object.__setattr__(self, "_hash", hash((self.symbol, args)))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"App({self.text})"


TermLike = Union[Term, str]


def app(symbol: str, *args: Term) -> App:
    return App(symbol, args)


def print_term(t: Term) -> str:
    return t.text


def _tokenize(text: str) -> list[str]:
    tokens = []
    for raw in text.splitlines():
        tokens.extend(_TOKEN_RE.findall(strip_comment(raw)))
    return tokens


def _parse_tokens(tokens: list[str], pos: int, sig: Signature) -> tuple[Term, int]:
    if pos >= len(tokens):
        raise ParseError("unexpected end of term")
    tok = tokens[pos]
    if tok == "(":
        if pos + 1 >= len(tokens) or not IDENT_RE.match(tokens[pos + 1]):
            raise ParseError("expected operation symbol after '('")
        head = tokens[pos + 1]
        if head not in sig:
            raise ParseError(f"unknown operation symbol {head!r}")
        pos += 2
        args = []
        while True:
            if pos >= len(tokens):
                raise ParseError("unbalanced parentheses")
            if tokens[pos] == ")":
                pos += 1
                break
            arg, pos = _parse_tokens(tokens, pos, sig)
            args.append(arg)
        if len(args) != sig.arity(head):
            raise ParseError(
                f"{head} expects {sig.arity(head)} arguments, got {len(args)}"
            )
        return App(head, tuple(args)), pos
    if tok == ")":
        raise ParseError("unbalanced parentheses")
    if not IDENT_RE.match(tok):
        raise ParseError(f"unexpected character {tok!r}")
    if tok in sig:
        if sig.arity(tok) != 0:
            raise ParseError(f"{tok} expects {sig.arity(tok)} arguments, got 0")
        return App(tok, ()), pos + 1
    return Var(tok), pos + 1


def parse_term(text: str, sig: Signature) -> Term:
    tokens = _tokenize(text)
    term, pos = _parse_tokens(tokens, 0, sig)
    if pos != len(tokens):
        raise ParseError(f"trailing input after term: {' '.join(tokens[pos:])!r}")
    return term


def variables_of(t: Term) -> tuple[str, ...]:
    """Variables of ``t`` in first-occurrence order."""
    seen: dict[str, None] = {}
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            seen.setdefault(u.name)
        else:
            stack.extend(reversed(u.args))
    return tuple(seen)


def variables_of_all(terms: Iterable[Term]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for t in terms:
        for v in variables_of(t):
            seen.setdefault(v)
    return tuple(seen)


def is_member_Tn(t: Term, n: int) -> bool:
    return len(variables_of(t)) == n


def check_term(t: Term, sig: Signature) -> None:
    """Raise ParseError unless every application matches ``sig``."""
    if isinstance(t, Var):
        if t.name in sig:
            raise ParseError(f"variable {t.name} clashes with a symbol")
        return
    if t.symbol not in sig:
        raise ParseError(f"unknown operation symbol {t.symbol!r}")
    if len(t.args) != sig.arity(t.symbol):
        raise ParseError(f"{t.symbol} expects {sig.arity(t.symbol)} arguments")
    for a in t.args:
        check_term(a, sig)


def substitute(t: Term, env: Mapping[str, Term]) -> Term:
    """Simultaneous substitution of ``env`` into ``t``."""
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise UnboundVariableError(f"no binding for variable {t.name}") from None
    return App(t.symbol, tuple(substitute(a, env) for a in t.args))


def rename(t: Term, mapping: Mapping[str, str]) -> Term:
    return substitute(t, {v: Var(mapping.get(v, v)) for v in variables_of(t)})


def term_key(t: Term) -> tuple[int, str]:
    return (t.depth, t.text)


def enumerate_terms(
    sig: Signature, vars: Sequence[str], max_depth: int, exact_vars: bool = False
) -> list[Term]:
    """All terms of depth <= ``max_depth`` over ``vars``.

    With ``exact_vars`` only terms using every variable in ``vars`` are kept.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    if not vars:
        raise ValueError("need at least one variable")
    level: list[Term] = [Var(v) for v in dict.fromkeys(vars)]
    for _ in range(max_depth):
        nxt: list[Term] = [Var(v) for v in dict.fromkeys(vars)]
        for name, k in sig:
            for args in itertools.product(level, repeat=k):
                nxt.append(App(name, args))
        level = nxt
    wanted = set(vars)
    out = [t for t in level if not exact_vars or set(variables_of(t)) == wanted]
    out.sort(key=term_key)
    return out
