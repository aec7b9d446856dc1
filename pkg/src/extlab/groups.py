"""Finite groups as dense multiplication tables.

Elements are the integers ``0..n-1`` with the identity pinned at ``0``.
Everything else in the package (subgroups, quotients, automorphism towers)
is index arithmetic on these tables.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    KernelMismatch,
    NoIdentityAtZero,
    NoInverse,
    NotAHomomorphism,
    NotAssociative,
    NotClosed,
    NotNormal,
    SearchBoundExceeded,
    ValidationError,
)

DEFAULT_SEARCH_BOUND = 64


class Group:
    """A finite group given by its multiplication table.

    The constructor trusts its input; use :func:`validate_group` for
    untrusted tables.
    """

    identity = 0

    def __init__(self, table, name: str | None = None):
        t = np.array(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise ValidationError("table must be a non-empty square array")
        t.setflags(write=False)
        self.table = t
        self.order = int(t.shape[0])
        self.name = name

    def __repr__(self):
        label = self.name or "Group"
        return f"<{label} of order {self.order}>"

    def __eq__(self, other):
        return isinstance(other, Group) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def __len__(self):
        return self.order

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def product(self, *xs: int) -> int:
        acc = 0
        for x in xs:
            acc = int(self.table[acc, x])
        return acc

    @cached_property
    def inv(self) -> np.ndarray:
        rows, cols = np.nonzero(self.table == 0)
        out = np.empty(self.order, dtype=np.int64)
        out[rows] = cols
        out.setflags(write=False)
        return out

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def conj(self, g: int, x: int) -> int:
        """Return g x g^-1."""
        return int(self.table[self.table[g, x], self.inv[g]])

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inverse(a), -k
        acc = 0
        for _ in range(k):
            acc = int(self.table[acc, a])
        return acc

    @cached_property
    def orders(self) -> np.ndarray:
        n = self.order
        out = np.zeros(n, dtype=np.int64)
        cur = np.arange(n)
        ar = np.arange(n)
        for k in range(1, n + 1):
            out[(cur == 0) & (out == 0)] = k
            cur = self.table[cur, ar]
        out.setflags(write=False)
        return out

    def element_order(self, a: int) -> int:
        return int(self.orders[a])

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def order_census(self) -> dict[int, int]:
        vals, counts = np.unique(self.orders, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}


def validate_group(table, name: str | None = None) -> Group:
    """Check the group axioms (identity at 0) and return a :class:`Group`.

    Errors name the first offending witness in row-major order.
    """
    t = np.asarray(table)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise NotClosed("table must be a non-empty square array")
    if t.dtype.kind not in "iu":
        if t.dtype == object and all(isinstance(x, (int, np.integer)) for x in t.flat):
            t = t.astype(np.int64)
        else:
            raise NotClosed("table entries must be integers")
    n = t.shape[0]
    bad = np.argwhere((t < 0) | (t >= n))
    if len(bad):
        a, b = (int(x) for x in bad[0])
        raise NotClosed(f"entry ({a},{b}) = {int(t[a, b])} out of range 0..{n - 1}")
    for k in range(n):
        if t[0, k] != k or t[k, 0] != k:
            raise NoIdentityAtZero(f"index 0 does not act as identity on {k}")
    for a in range(n):
        if not np.any((t[a, :] == 0) & (t[:, a] == 0)):
            raise NoInverse(a)
    for a in range(n):
        lhs = t[t[a, :], :]  # (a b) c, indexed [b, c]
        rhs = t[a, t]  # a (b c)
        diff = np.argwhere(lhs != rhs)
        if len(diff):
            b, c = (int(x) for x in diff[0])
            raise NotAssociative(a, b, c)
    return Group(t, name=name)


@dataclass(frozen=True, eq=False)
class Subgroup:
    ambient: Group
    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(int(m) for m in self.members)))

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and self.ambient == other.ambient
            and self.members == other.members
        )

    def __hash__(self):
        return hash(self.members)

    @cached_property
    def _set(self) -> frozenset:
        return frozenset(self.members)

    def __contains__(self, x) -> bool:
        return int(x) in self._set

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def order(self) -> int:
        return len(self.members)

    @cached_property
    def _as_group(self):
        idx = {m: k for k, m in enumerate(self.members)}
        t = self.ambient.table
        mem = np.array(self.members)
        sub = t[np.ix_(mem, mem)]
        table = np.vectorize(idx.__getitem__, otypes=[np.int64])(sub)
        grp = Group(table)
        return grp, Homomorphism(grp, self.ambient, self.members)

    def as_group(self) -> tuple[Group, "Homomorphism"]:
        """The subgroup as a stand-alone group plus its embedding."""
        return self._as_group

    def position(self, x: int) -> int:
        """Index of ambient element ``x`` inside :meth:`as_group`."""
        return self.members.index(int(x))


@dataclass(frozen=True, eq=False)
class Homomorphism:
    """A map of groups; construct through :func:`make_homomorphism` to validate."""

    source: Group
    target: Group
    map: tuple

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(int(x) for x in self.map))

    def __call__(self, a: int) -> int:
        return self.map[a]

    def __eq__(self, other):
        return (
            isinstance(other, Homomorphism)
            and self.source == other.source
            and self.target == other.target
            and self.map == other.map
        )

    def __hash__(self):
        return hash(self.map)

    @cached_property
    def arr(self) -> np.ndarray:
        a = np.array(self.map, dtype=np.int64)
        a.setflags(write=False)
        return a

    def compose(self, other: "Homomorphism") -> "Homomorphism":
        """Return ``self o other``."""
        return Homomorphism(other.source, self.target, self.arr[other.arr])

    def image(self) -> Subgroup:
        return Subgroup(self.target, tuple(set(self.map)))

    def kernel(self) -> Subgroup:
        return Subgroup(self.source, tuple(a for a, b in enumerate(self.map) if b == 0))

    @property
    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.order

    def preimages(self, b: int) -> list[int]:
        return [a for a, x in enumerate(self.map) if x == b]


def homomorphism_violation(source: Group, target: Group, m) -> tuple[int, int] | None:
    m = np.asarray(m, dtype=np.int64)
    lhs = m[source.table]
    rhs = target.table[m[:, None], m[None, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        return int(bad[0][0]), int(bad[0][1])
    return None


def make_homomorphism(source: Group, target: Group, m) -> Homomorphism:
    m = [int(x) for x in m]
    if len(m) != source.order:
        raise NotAHomomorphism(f"map has length {len(m)}, expected {source.order}")
    if any(x < 0 or x >= target.order for x in m):
        raise NotAHomomorphism("map value out of range")
    if m[0] != 0:
        raise NotAHomomorphism("identity not sent to identity")
    bad = homomorphism_violation(source, target, m)
    if bad:
        raise NotAHomomorphism(f"map(a*b) != map(a)*map(b) for (a,b) = {bad}")
    return Homomorphism(source, target, tuple(m))


@dataclass(frozen=True, eq=False)
class PartialMap:
    """A normalized set map (sections, liftings): only map[0] = 0 is required."""

    source: Group
    target: Group
    map: tuple

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(int(x) for x in self.map))
        if len(self.map) != self.source.order:
            raise ValidationError("partial map has wrong length")
        if self.map and self.map[0] != 0:
            raise ValidationError("partial map must send identity to identity")

    def __call__(self, a: int) -> int:
        return self.map[a]


def identity_homomorphism(G: Group) -> Homomorphism:
    return Homomorphism(G, G, tuple(range(G.order)))


# ---------------------------------------------------------------------------
# subgroups, normality, quotients


def closure(G: Group, start: Iterable[int], gens: Sequence[int]) -> set[int]:
    seen = set(int(x) for x in start) | {0}
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for g in gens:
            y = int(G.table[x, g])
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def subgroup_generated(G: Group, gens: Iterable[int]) -> Subgroup:
    gens = [int(g) for g in gens]
    return Subgroup(G, tuple(closure(G, gens, gens)))


def is_normal(G: Group, H: Subgroup) -> bool:
    mem = np.array(H.members)
    allowed = np.zeros(G.order, dtype=bool)
    allowed[mem] = True
    for g in range(G.order):
        conj = G.table[G.table[g, mem], G.inv[g]]
        if not allowed[conj].all():
            return False
    return True


def center(G: Group) -> Subgroup:
    t = G.table
    return Subgroup(G, tuple(z for z in range(G.order) if np.array_equal(t[z, :], t[:, z])))


def centralizer(G: Group, xs: Iterable[int]) -> Subgroup:
    xs = list(xs)
    t = G.table
    return Subgroup(G, tuple(g for g in range(G.order) if all(t[g, x] == t[x, g] for x in xs)))


@dataclass(frozen=True, eq=False)
class CosetQuotient:
    """G/N with the lexicographically least member of each coset as label.

    ``automorphisms`` is set when ``total`` is the table of an
    :class:`AutomorphismGroup`; then coset labels can be turned back into
    permutations.
    """

    total: Group
    normal: Subgroup
    classes: tuple
    quotient: Group
    projection: Homomorphism
    automorphisms: "AutomorphismGroup | None" = None

    def class_of(self, g: int) -> int:
        return self.projection.map[g]

    def representative(self, c: int) -> int:
        return self.classes[c]

    def rep_perm(self, c: int) -> tuple:
        return self.automorphisms.elements[self.classes[c]]

    def class_of_perm(self, perm) -> int:
        return self.projection.map[self.automorphisms.index_of(perm)]

    def coset(self, c: int) -> list[int]:
        return [g for g in range(self.total.order) if self.projection.map[g] == c]


def coset_quotient(G: Group, N: Subgroup, automorphisms=None) -> CosetQuotient:
    if not is_normal(G, N):
        raise NotNormal("subgroup is not normal")
    mem = np.array(N.members)
    rep_of = G.table[:, mem].min(axis=1)
    reps = tuple(sorted(set(int(r) for r in rep_of)))
    cls = {r: k for k, r in enumerate(reps)}
    proj = tuple(cls[int(r)] for r in rep_of)
    m = len(reps)
    qt = np.empty((m, m), dtype=np.int64)
    for a, ra in enumerate(reps):
        for b, rb in enumerate(reps):
            qt[a, b] = proj[G.table[ra, rb]]
    Q = Group(qt)
    return CosetQuotient(G, N, reps, Q, Homomorphism(G, Q, proj), automorphisms)


def quotient(G: Group, N: Subgroup) -> tuple[Group, Homomorphism]:
    cq = coset_quotient(G, N)
    return cq.quotient, cq.projection


# ---------------------------------------------------------------------------
# homomorphism / automorphism search


def generating_set(G: Group) -> list[int]:
    """Greedy small generating set, largest element orders first."""
    gens: list[int] = []
    span = {0}
    for a in sorted(range(G.order), key=lambda x: (-int(G.orders[x]), x)):
        if len(span) == G.order:
            break
        if a not in span:
            gens.append(a)
            span = closure(G, span, gens)
    return gens


def extend_generators(G: Group, H: Group, gens, imgs) -> dict | None:
    """Extend generator images to a map on <gens>; None if inconsistent."""
    return _extend(G, H, gens, imgs)


def _extend(G: Group, H: Group, gens, imgs):
    """Extend generator images to a map on <gens>; None if inconsistent."""
    mapping = {0: 0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        fx = mapping[x]
        for g, h in zip(gens, imgs):
            y = int(G.table[g, x])
            v = int(H.table[h, fx])
            got = mapping.get(y)
            if got is None:
                mapping[y] = v
                queue.append(y)
            elif got != v:
                return None
    return mapping


def homomorphisms(G: Group, H: Group, injective: bool = False, surjective: bool = False,
                  bound: int | None = None) -> list[tuple]:
    """All homomorphisms G -> H by backtracking over generator images."""
    if bound is not None and max(G.order, H.order) > bound:
        raise SearchBoundExceeded(f"group order exceeds search bound {bound}")
    gens = generating_set(G)
    out: list[tuple] = []

    def rec(k, imgs):
        if k == len(gens):
            m = _extend(G, H, gens, imgs)
            if m is None or len(m) != G.order:
                return
            vec = tuple(m[a] for a in range(G.order))
            if injective and len(set(vec)) != len(vec):
                return
            if surjective and len(set(vec)) != H.order:
                return
            out.append(vec)
            return
        go = int(G.orders[gens[k]])
        for h in range(H.order):
            ho = int(H.orders[h])
            if (injective and ho != go) or go % ho:
                continue
            nxt = imgs + [h]
            m = _extend(G, H, gens[: k + 1], nxt)
            if m is None:
                continue
            if injective and len(set(m.values())) != len(m):
                continue
            rec(k + 1, nxt)

    rec(0, [])
    out.sort()
    return out


def find_isomorphism(G: Group, H: Group) -> tuple | None:
    """Some isomorphism G -> H as a tuple, or None (backtracking, early exit)."""
    if G.order != H.order or sorted(G.orders.tolist()) != sorted(H.orders.tolist()):
        return None
    gens = generating_set(G)

    def rec(k, imgs):
        if k == len(gens):
            m = _extend(G, H, gens, imgs)
            if m is None or len(m) != G.order or len(set(m.values())) != G.order:
                return None
            return tuple(m[a] for a in range(G.order))
        go = int(G.orders[gens[k]])
        for h in range(H.order):
            if int(H.orders[h]) != go:
                continue
            m = _extend(G, H, gens[: k + 1], imgs + [h])
            if m is None or len(set(m.values())) != len(m):
                continue
            got = rec(k + 1, imgs + [h])
            if got is not None:
                return got
        return None

    return rec(0, [])


class AutomorphismGroup:
    """A set of automorphisms of ``base`` closed under composition.

    Elements are permutation tuples sorted lexicographically, so the identity
    is element 0. ``table[a, b]`` is the index of ``elements[a] o elements[b]``.
    """

    def __init__(self, base: Group, perms: Iterable[Sequence[int]], name: str | None = None):
        self.base = base
        self.elements = tuple(sorted(set(tuple(int(x) for x in p) for p in perms)))
        self.name = name
        self._index = {p: k for k, p in enumerate(self.elements)}
        if not self.elements or self.elements[0] != tuple(range(base.order)):
            raise ValidationError("automorphism set must contain the identity")
        arr = np.array(self.elements, dtype=np.int64).reshape(len(self.elements), base.order)
        self.arr = arr
        m = len(self.elements)
        t = np.empty((m, m), dtype=np.int64)
        for a in range(m):
            for b in range(m):
                key = tuple(arr[a][arr[b]].tolist())
                k = self._index.get(key)
                if k is None:
                    raise ValidationError("automorphism set not closed under composition")
                t[a, b] = k
        self.table = Group(t, name=name)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"<AutomorphismGroup of order {len(self)} on {self.base!r}>"

    @property
    def order(self) -> int:
        return len(self.elements)

    def index_of(self, perm) -> int:
        return self._index[tuple(int(x) for x in perm)]

    def __contains__(self, perm) -> bool:
        return tuple(int(x) for x in perm) in self._index

    def subgroup(self, perms: Iterable[Sequence[int]]) -> Subgroup:
        return Subgroup(self.table, tuple(self.index_of(p) for p in perms))


def compose_perms(a, b) -> tuple:
    """(a o b)(x) = a(b(x))."""
    return tuple(a[x] for x in b)


def invert_perm(a) -> tuple:
    out = [0] * len(a)
    for x, y in enumerate(a):
        out[y] = x
    return tuple(out)


def automorphism_group(G: Group, bound: int = DEFAULT_SEARCH_BOUND) -> AutomorphismGroup:
    if G.order > bound:
        raise SearchBoundExceeded(f"|G| = {G.order} exceeds search bound {bound}")
    return _aut_cached(G)


_AUT_CACHE: dict = {}


def _aut_cached(G: Group) -> AutomorphismGroup:
    key = G.table.tobytes()
    hit = _AUT_CACHE.get(key)
    if hit is None or hit.base != G:
        hit = AutomorphismGroup(G, homomorphisms(G, G, injective=True), name="Aut")
        _AUT_CACHE[key] = hit
    return hit


def conjugation_perm(G: Group, g: int) -> tuple:
    return tuple(int(x) for x in G.table[G.table[g, :], G.inv[g]])


def inner_automorphisms(G: Group) -> tuple[AutomorphismGroup, Homomorphism]:
    perms = [conjugation_perm(G, g) for g in range(G.order)]
    inn = AutomorphismGroup(G, perms, name="Inn")
    hom = make_homomorphism(G, inn.table, [inn.index_of(p) for p in perms])
    return inn, hom


def outer_automorphisms(G: Group, bound: int = DEFAULT_SEARCH_BOUND) -> CosetQuotient:
    """Out(G) = Aut(G)/Inn(G) with canonical representatives."""
    aut = automorphism_group(G, bound)
    inn = aut.subgroup(conjugation_perm(G, g) for g in range(G.order))
    return coset_quotient(aut.table, inn, automorphisms=aut)


def relative_automorphisms(N: Group, K: Subgroup, bound: int = DEFAULT_SEARCH_BOUND):
    """Aut_K(N), the conjugations C_N(K) by elements of K, and Out(N;K)."""
    if not is_normal(N, K):
        raise NotNormal("K is not normal in N")
    aut = automorphism_group(N, bound)
    kset = K._set
    stab = [p for p in aut.elements if all(p[k] in kset for k in K.members)]
    aut_k = AutomorphismGroup(N, stab, name="Aut_K")
    ck = aut_k.subgroup(conjugation_perm(N, k) for k in K.members)
    out = coset_quotient(aut_k.table, ck, automorphisms=aut_k)
    return aut_k, ck, out


@dataclass(frozen=True, eq=False)
class InducedMaps:
    """The canonical maps out of Aut_K(N) and Out(N;K)."""

    aut_k: AutomorphismGroup
    out: CosetQuotient
    aut_K: AutomorphismGroup  # Aut of K as a stand-alone group
    out_K: CosetQuotient
    aut_P: AutomorphismGroup
    nk: Homomorphism  # Aut_K(N) -> Aut(K)
    np_: Homomorphism  # Aut_K(N) -> Aut(P)
    out_nk: Homomorphism  # Out(N;K) -> Out(K)
    out_np: Homomorphism  # Out(N;K) -> Aut(P)
    K_sub: Subgroup

    def restrict_to_K(self, perm) -> tuple:
        return restrict_perm(perm, self.K_sub)


def restrict_perm(perm, sub: Subgroup) -> tuple:
    """Restrict an automorphism stabilizing ``sub`` to ``sub.as_group()`` labels."""
    pos = {m: k for k, m in enumerate(sub.members)}
    return tuple(pos[perm[m]] for m in sub.members)


def induced_on_quotient(perm, pi: Homomorphism) -> tuple:
    """Automorphism induced on the target of a surjection whose kernel is stable."""
    out = [None] * pi.target.order
    for n, p in enumerate(pi.map):
        v = pi.map[perm[n]]
        if out[p] is None:
            out[p] = v
        elif out[p] != v:
            raise KernelMismatch("automorphism does not descend to the quotient")
    return tuple(out)


def induced_maps_NK_NP(N: Group, K: Subgroup, P: Group, pi0: Homomorphism,
                       bound: int = DEFAULT_SEARCH_BOUND) -> InducedMaps:
    if set(pi0.kernel().members) != set(K.members) or not pi0.is_surjective:
        raise KernelMismatch("K must be the kernel of the surjection pi0")
    aut_k, _, out = relative_automorphisms(N, K, bound)
    Kg, _ = K.as_group()
    out_K = outer_automorphisms(Kg, bound)
    aut_K = out_K.automorphisms
    aut_P = automorphism_group(P, bound)
    nk = make_homomorphism(
        aut_k.table, aut_K.table, [aut_K.index_of(restrict_perm(p, K)) for p in aut_k.elements]
    )
    np_ = make_homomorphism(
        aut_k.table, aut_P.table,
        [aut_P.index_of(induced_on_quotient(p, pi0)) for p in aut_k.elements],
    )
    out_nk = make_homomorphism(
        out.quotient, out_K.quotient, [out_K.class_of(nk.map[r]) for r in out.classes]
    )
    out_np = make_homomorphism(out.quotient, aut_P.table, [np_.map[r] for r in out.classes])
    return InducedMaps(aut_k, out, aut_K, out_K, aut_P, nk, np_, out_nk, out_np, K)


# ---------------------------------------------------------------------------
# abelian structure


def _primes(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _p_basis(G: Group, p: int) -> list[int]:
    """Basis of the p-primary part, element orders non-increasing."""
    part = [a for a in range(G.order) if _is_power_of(int(G.orders[a]), p)]
    basis: list[int] = []
    span = {0}
    while len(span) < len(part):
        rel = {}
        for a in part:
            k, x = 1, a
            while x not in span:
                x = int(G.table[x, a])
                k += 1
            rel[a] = k  # order of a modulo span
        best = max(rel.values())
        pick = next((a for a in part if rel[a] == best and int(G.orders[a]) == best), None)
        if pick is None:
            raise ValidationError("failed to find a basis element (group not abelian?)")
        basis.append(pick)
        span = closure(G, span, basis)
    return basis


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def abelian_basis(G: Group) -> list[tuple[int, int]]:
    """Invariant-factor basis ``[(element, order), ...]`` of an abelian group.

    Orders satisfy d_1 | d_2 | ... and G is the internal direct sum of the
    cyclic subgroups they generate. The trivial group gives ``[]``.
    """
    if not G.is_abelian:
        raise ValidationError("group is not abelian")
    per_prime = {p: _p_basis(G, p) for p in _primes(G.order)}
    width = max((len(b) for b in per_prime.values()), default=0)
    out = []
    for j in range(width):
        # j-th largest from every prime, combined into one element
        elem, order = 0, 1
        for p, b in per_prime.items():
            if j < len(b):
                x = b[j]
                elem = int(G.table[elem, x])
                order *= int(G.orders[x])
        out.append((elem, order))
    out.reverse()
    return out


def abelian_invariants(G: Group) -> tuple[int, ...]:
    return tuple(d for _, d in abelian_basis(G))


def fingerprint(G: Group) -> dict:
    """Isomorphism invariants cheap enough to bucket catalog-scale groups."""
    census = G.order_census()
    Z = center(G)
    return {
        "order": G.order,
        "abelian": G.is_abelian,
        "center": Z.order,
        "census": [[k, census[k]] for k in sorted(census)],
    }


def direct_product(G: Group, H: Group, name: str | None = None) -> Group:
    """G x H with (g, h) stored at index g * |H| + h."""
    n, m = G.order, H.order
    t = (G.table[:, None, :, None] * m + H.table[None, :, None, :]).reshape(n * m, n * m)
    return Group(t, name=name or (f"{G.name}x{H.name}" if G.name and H.name else None))
