"""Shipped example algebras and axiom sets."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

import numpy as np

from .algebra import FiniteAlgebra, parse_ualg
from .equations import AxiomSet, parse_axioms
from .terms import Signature

BISEMILATTICE = Signature((("meet", 2), ("join", 2)))

# file stem -> names of the algebras it holds
ALGEBRA_FILES = {
    "exss": ("exss",),
    "bichain_3m": ("bichain_3m",),
    "bichain_3j": ("bichain_3j",),
    "bichain_3n": ("bichain_3n",),
    "a_inf_2": ("a_inf_2",),
    "squag3": ("squag3",),
    "bands": ("lz2", "rz2", "lz3", "lr3", "rr3", "rect22"),
    "semilattices": ("chain1", "chain2", "chain3", "vee3", "square4"),
}
AXIOM_FILES = ("band", "birkhoff", "cg_quasi", "commutative", "lattice", "lz", "semilattice", "squag")

# join orders of the three bichains; the meet order is 0 < 1 < 2 throughout
BICHAIN_JOIN_ORDERS = {"3m": (0, 2, 1), "3j": (1, 0, 2), "3n": (2, 0, 1)}


def data_path(filename: str):
    return resources.files("semisum") / "data" / filename


def read_text(filename: str) -> str:
    return data_path(filename).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def _file_algebras(stem: str) -> tuple[FiniteAlgebra, ...]:
    return tuple(parse_ualg(read_text(f"{stem}.ualg")))


def algebra(name: str) -> FiniteAlgebra:
    """A fixture algebra by name, e.g. ``"exss"`` or ``"rz2"``."""
    for stem, names in ALGEBRA_FILES.items():
        if name in names:
            return _file_algebras(stem)[names.index(name)]
    raise KeyError(f"no fixture algebra named {name!r}")


def all_algebras() -> list[FiniteAlgebra]:
    return [A for stem in ALGEBRA_FILES for A in _file_algebras(stem)]


@lru_cache(maxsize=None)
def axioms(name: str) -> AxiomSet:
    if name not in AXIOM_FILES:
        raise KeyError(f"no fixture axiom set named {name!r}")
    return parse_axioms(read_text(f"{name}.eq"), name=name)


def bichain(join_order, name: str = "") -> FiniteAlgebra:
    """Bisemilattice on {0, 1, 2} with meet = min and join = max in
    ``join_order`` (listed from least to greatest)."""
    n = len(join_order)
    rank = np.empty(n, dtype=np.int64)
    rank[list(join_order)] = np.arange(n)
    a, b = np.indices((n, n))
    meet = np.minimum(a, b)
    join = np.where(rank[a] >= rank[b], a, b)
    return FiniteAlgebra(BISEMILATTICE, n, {"meet": meet, "join": join}, name)


def bounded_lattice_with_infinity(lattice: FiniteAlgebra, bottom: int, top: int) -> FiniteAlgebra:
    """Adjoin a point ``inf`` (the new last element) with a . inf = bottom
    and a + inf = top for every a of the lattice."""
    n = lattice.size
    inf = n
    meet = np.full((n + 1, n + 1), bottom, dtype=np.int64)
    join = np.full((n + 1, n + 1), top, dtype=np.int64)
    meet[:n, :n] = lattice.table("meet")
    join[:n, :n] = lattice.table("join")
    meet[inf, inf] = join[inf, inf] = inf
    return FiniteAlgebra(BISEMILATTICE, n + 1, {"meet": meet, "join": join})


def two_element_lattice() -> FiniteAlgebra:
    a, b = np.indices((2, 2))
    return FiniteAlgebra(BISEMILATTICE, 2, {"meet": np.minimum(a, b), "join": np.maximum(a, b)})
