"""Built-in group catalog.

Each entry carries a generator description from which its table is rebuilt;
the shipped tables in ``catalog_tables.json`` must match the rebuilt ones
(checked by the test suite). Permutation groups list their elements in
lexicographic order of the permutation tuples, products of cyclic groups in
lexicographic order of coordinate vectors; either way the identity is 0.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import ValidationError
from .groups import Group, Homomorphism, find_isomorphism, make_homomorphism, validate_group


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str  # "cyclic_product" or "permutations"
    data: tuple
    order: int
    abelian: bool

    @property
    def description(self) -> str:
        if self.kind == "cyclic_product":
            return "direct product of cyclic groups of orders " + "x".join(map(str, self.data))
        gens = ", ".join(str(g) for g in self.data)
        return f"permutation group generated by {gens} (0-based images)"


def cyclic_product_table(moduli) -> np.ndarray:
    moduli = tuple(int(m) for m in moduli)
    elems = list(itertools.product(*[range(m) for m in moduli]))
    idx = {e: k for k, e in enumerate(elems)}
    n = len(elems)
    t = np.empty((n, n), dtype=np.int64)
    for a, ea in enumerate(elems):
        for b, eb in enumerate(elems):
            t[a, b] = idx[tuple((x + y) % m for x, y, m in zip(ea, eb, moduli))]
    return t


def permutation_closure(gens) -> list[tuple]:
    gens = [tuple(g) for g in gens]
    if not gens:
        return []
    ident = tuple(range(len(gens[0])))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(p[x] for x in g)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return sorted(seen)


def permutation_group_table(gens) -> np.ndarray:
    """Table of the group generated by ``gens``; product is (a*b)(x) = a(b(x))."""
    elems = permutation_closure(gens)
    idx = {e: k for k, e in enumerate(elems)}
    n = len(elems)
    t = np.empty((n, n), dtype=np.int64)
    for a, ea in enumerate(elems):
        for b, eb in enumerate(elems):
            t[a, b] = idx[tuple(ea[x] for x in eb)]
    return t


ENTRIES = {
    e.name: e
    for e in [
        CatalogEntry("C1", "cyclic_product", (1,), 1, True),
        CatalogEntry("C2", "cyclic_product", (2,), 2, True),
        CatalogEntry("C3", "cyclic_product", (3,), 3, True),
        CatalogEntry("C4", "cyclic_product", (4,), 4, True),
        CatalogEntry("C6", "cyclic_product", (6,), 6, True),
        CatalogEntry("C8", "cyclic_product", (8,), 8, True),
        CatalogEntry("C2xC2", "cyclic_product", (2, 2), 4, True),
        CatalogEntry("C2xC4", "cyclic_product", (2, 4), 8, True),
        CatalogEntry("C4xC2", "cyclic_product", (4, 2), 8, True),
        CatalogEntry("C2xC2xC2", "cyclic_product", (2, 2, 2), 8, True),
        CatalogEntry("S3", "permutations", ((1, 2, 0), (1, 0, 2)), 6, False),
        CatalogEntry("D4", "permutations", ((1, 2, 3, 0), (2, 1, 0, 3)), 8, False),
        CatalogEntry(
            "Q8", "permutations",
            ((1, 3, 5, 6, 2, 7, 0, 4), (2, 4, 3, 7, 6, 1, 5, 0)), 8, False,
        ),
        CatalogEntry("A4", "permutations", ((1, 2, 0, 3), (1, 0, 3, 2)), 12, False),
        CatalogEntry("D6", "permutations", ((1, 2, 3, 4, 5, 0), (0, 5, 4, 3, 2, 1)), 12, False),
    ]
}


def build_table(entry: CatalogEntry) -> np.ndarray:
    if entry.kind == "cyclic_product":
        return cyclic_product_table(entry.data)
    return permutation_group_table(entry.data)


@lru_cache(maxsize=None)
def _shipped() -> dict:
    text = resources.files("extlab").joinpath("catalog_tables.json").read_text()
    return json.loads(text)


def regenerate() -> dict:
    return {name: build_table(e).tolist() for name, e in ENTRIES.items()}


@lru_cache(maxsize=None)
def get(name: str) -> Group:
    """Catalog group by name, from the shipped precomputed tables."""
    if name not in ENTRIES:
        raise ValidationError(f"unknown catalog group {name!r}; known: {sorted(ENTRIES)}")
    return validate_group(_shipped()[name], name=name)


def names() -> list[str]:
    return list(ENTRIES)


def identify(G: Group) -> list[str]:
    """Names of catalog groups isomorphic to G."""
    return [n for n, e in ENTRIES.items() if e.order == G.order and find_isomorphism(G, get(n)) is not None]


# ---------------------------------------------------------------------------
# maps between products of cyclic groups, used to build standard instances


def cyclic_coords(name: str) -> list[tuple]:
    e = ENTRIES[name]
    if e.kind != "cyclic_product":
        raise ValidationError(f"{name} is not a product of cyclic groups")
    return list(itertools.product(*[range(m) for m in e.data]))


def linear_map(src: str, dst: str, matrix) -> Homomorphism:
    """Homomorphism between cyclic products given by an integer matrix.

    The image of coordinate vector ``x`` is ``x @ matrix`` reduced modulo the
    target moduli.
    """
    sc, dc = cyclic_coords(src), cyclic_coords(dst)
    mods = ENTRIES[dst].data
    idx = {c: k for k, c in enumerate(dc)}
    M = np.array(matrix, dtype=np.int64).reshape(len(ENTRIES[src].data), len(mods))
    m = [idx[tuple(int(v) % d for v, d in zip(np.array(c) @ M, mods))] for c in sc]
    return make_homomorphism(get(src), get(dst), m)


if __name__ == "__main__":  # pragma: no cover - maintenance entry point
    import sys

    out = json.dumps(regenerate(), separators=(",", ":"))
    sys.stdout.write(out + "\n")
