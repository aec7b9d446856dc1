"""Normalized cochains of a finite group acting on a finite abelian group.

Coefficient groups are multiplicative tables like every other group in the
package, but the cohomology engine works additively: the coefficient group
is written once in invariant-factor coordinates and the cocycle and
coboundary conditions become linear systems over Z/N (see ``abelian``).

Conventions::

    d0 z0 (q)      = z0^-1 . q(z0)
    d1 z (q1, q2)  = z(q1) . q1(z(q2)) . z(q1 q2)^-1
    2-cocycle:       d(a,b) d(ab,c) = a(d(b,c)) d(a,bc)
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .abelian import LinearSolver, Submodule, enumerate_span, kernel
from .errors import (
    CoefficientMismatch,
    DegreeTooHigh,
    NoInvarianceWitness,
    NotACocycle,
    NotInH2P,
    NotWellDefined,
    SizeBoundExceeded,
    ValidationError,
)
from .groups import (
    AutomorphismGroup,
    Group,
    Homomorphism,
    Subgroup,
    abelian_basis,
    abelian_invariants,
    homomorphism_violation,
    make_homomorphism,
)

#: largest coboundary-matrix size (rows * columns) the engine will build
DEFAULT_SIZE_BOUND = 4_000_000


class Coordinates:
    """Invariant-factor coordinates of a finite abelian group."""

    def __init__(self, A: Group):
        basis = abelian_basis(A)
        self.group = A
        self.basis = tuple(b for b, _ in basis)
        self.moduli = tuple(d for _, d in basis)
        self.rank = len(basis)
        self.N = self.moduli[-1] if basis else 1
        lookup = np.zeros(self.moduli, dtype=np.int64) if basis else np.zeros((), dtype=np.int64)
        coords = np.zeros((A.order, self.rank), dtype=np.int64)
        for vec in itertools.product(*[range(d) for d in self.moduli]):
            e = 0
            for b, k in zip(self.basis, vec):
                e = A.table[e, A.power(b, k)]
            lookup[vec] = e
            coords[e] = vec
        self.lookup = lookup
        self.coords = coords

    def encode(self, a: int) -> np.ndarray:
        return self.coords[a]

    def decode(self, v) -> int:
        if not self.rank:
            return 0
        v = tuple(int(x) % d for x, d in zip(v, self.moduli))
        return int(self.lookup[v])


class CoefficientModule:
    """A finite abelian group ``coeffs`` with a left action of ``actor``.

    ``action[q]`` is the permutation of coefficient indices by which ``q``
    acts.
    """

    def __init__(self, actor: Group, coeffs: Group, action, name: str | None = None,
                 check: bool = True):
        act = np.array(action, dtype=np.int64).reshape(actor.order, coeffs.order)
        act.setflags(write=False)
        self.actor = actor
        self.coeffs = coeffs
        self.action = act
        self.name = name
        if check:
            self._validate()

    def _validate(self):
        if not self.coeffs.is_abelian:
            raise ValidationError("coefficient group must be abelian")
        A = self.coeffs
        if not np.array_equal(self.action[0], np.arange(A.order)):
            raise ValidationError("identity must act trivially")
        for q in range(self.actor.order):
            p = self.action[q]
            if sorted(p.tolist()) != list(range(A.order)) or homomorphism_violation(A, A, p):
                raise ValidationError(f"element {q} does not act by an automorphism")
        T = self.actor.table
        lhs = self.action[T]  # [q1, q2, a] = (q1 q2) a
        rhs = self.action[np.arange(self.actor.order)[:, None, None], self.action[None, :, :]]
        if not np.array_equal(lhs, rhs):
            bad = np.argwhere(lhs != rhs)[0]
            raise ValidationError(f"action is not a homomorphism at ({bad[0]}, {bad[1]})")

    @classmethod
    def trivial(cls, actor: Group, coeffs: Group, name: str | None = None):
        return cls(actor, coeffs, np.tile(np.arange(coeffs.order), (actor.order, 1)), name)

    def __eq__(self, other):
        return (
            isinstance(other, CoefficientModule)
            and self.actor == other.actor
            and self.coeffs == other.coeffs
            and np.array_equal(self.action, other.action)
        )

    def __hash__(self):
        return hash((self.actor, self.coeffs, self.action.tobytes()))

    def __repr__(self):
        return f"<CoefficientModule {self.name or ''} actor order {self.actor.order}, coeffs order {self.coeffs.order}>"

    def act(self, q: int, a: int) -> int:
        return int(self.action[q, a])

    @cached_property
    def is_trivial_action(self) -> bool:
        return bool((self.action == np.arange(self.coeffs.order)).all())

    @cached_property
    def coords(self) -> Coordinates:
        return Coordinates(self.coeffs)

    @cached_property
    def coord_matrices(self) -> np.ndarray:
        """T[q] with coords(q.a) = coords(a) @ T[q] (mod the invariant factors)."""
        c = self.coords
        out = np.zeros((self.actor.order, c.rank, c.rank), dtype=np.int64)
        for q in range(self.actor.order):
            for j, b in enumerate(c.basis):
                out[q, j] = c.coords[self.action[q, b]]
        return out

    def action_homomorphism(self) -> Homomorphism:
        """The action as a homomorphism into (the image in) Aut(coeffs)."""
        perms = {tuple(p) for p in self.action.tolist()}
        aut = AutomorphismGroup(self.coeffs, perms)
        return make_homomorphism(self.actor, aut.table, [aut.index_of(p) for p in self.action.tolist()])


def restrict_module(M: CoefficientModule, hom: Homomorphism, name: str | None = None) -> CoefficientModule:
    """Pull the action back along ``hom: S -> M.actor``."""
    return CoefficientModule(hom.source, M.coeffs, M.action[hom.arr], name=name, check=False)


def fixed_subgroup(M: CoefficientModule, elements: Sequence[int]) -> Subgroup:
    fixed = [a for a in range(M.coeffs.order) if all(M.action[q, a] == a for q in elements)]
    return Subgroup(M.coeffs, tuple(fixed))


# ---------------------------------------------------------------------------
# cochains


def _slots(n: int, order: int) -> list[tuple]:
    if n == 0:
        return [()]
    return list(itertools.product(range(1, order), repeat=n))


def _shape(n: int, order: int) -> tuple:
    return (order,) * n


class Cochain:
    """A normalized n-cochain (n = 0, 1, 2) with values as coefficient indices."""

    __slots__ = ("degree", "module", "values")

    def __init__(self, degree: int, module: CoefficientModule, values):
        v = np.array(values, dtype=np.int64)
        if degree not in (0, 1, 2, 3):
            raise DegreeTooHigh(f"degree {degree} not supported")
        if v.shape != _shape(degree, module.actor.order):
            raise ValidationError(f"cochain values have shape {v.shape}")
        if degree >= 1:
            ix = np.indices(v.shape)
            if (v[(ix == 0).any(axis=0)] != 0).any():
                raise ValidationError("cochain is not normalized")
        if ((v < 0) | (v >= module.coeffs.order)).any():
            raise ValidationError("cochain value out of range")
        v.setflags(write=False)
        self.degree = degree
        self.module = module
        self.values = v

    def __repr__(self):
        return f"Cochain(degree={self.degree}, values={self.values.tolist()})"

    def __eq__(self, other):
        return (
            isinstance(other, Cochain)
            and self.degree == other.degree
            and np.array_equal(self.values, other.values)
            and (self.module is other.module or self.module == other.module)
        )

    def __hash__(self):
        return hash((self.degree, self.values.tobytes()))

    def __call__(self, *args) -> int:
        return int(self.values[args])

    @classmethod
    def zero(cls, degree: int, module: CoefficientModule) -> "Cochain":
        return cls(degree, module, np.zeros(_shape(degree, module.actor.order), dtype=np.int64))

    @classmethod
    def from_function(cls, degree: int, module: CoefficientModule, f: Callable) -> "Cochain":
        n = module.actor.order
        vals = np.zeros(_shape(degree, n), dtype=np.int64)
        for args in itertools.product(range(n), repeat=degree):
            vals[args] = f(*args)
        return cls(degree, module, vals)

    def _check_same(self, other):
        if self.degree != other.degree or self.module.coeffs != other.module.coeffs:
            raise CoefficientMismatch("cochains live in different groups")

    def __mul__(self, other: "Cochain") -> "Cochain":
        """Pointwise product (the group law, written additively elsewhere)."""
        self._check_same(other)
        return Cochain(self.degree, self.module, self.module.coeffs.table[self.values, other.values])

    def inverse(self) -> "Cochain":
        return Cochain(self.degree, self.module, self.module.coeffs.inv[self.values])

    def __truediv__(self, other: "Cochain") -> "Cochain":
        return self * other.inverse()

    def is_zero(self) -> bool:
        return not self.values.any()

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "actor": self.module.actor.name,
            "coefficients": self.module.coeffs.name,
            "values": self.values.tolist(),
        }


def coboundary(c: Cochain) -> Cochain:
    """d of a 0- or 1-cochain."""
    if c.degree > 1:
        raise DegreeTooHigh("coboundary is defined here for degrees 0 and 1")
    return _coboundary(c)


def _coboundary(c: Cochain) -> Cochain:
    M, A, Q = c.module, c.module.coeffs, c.module.actor
    n = Q.order
    if c.degree == 0:
        z0 = int(c.values)
        vals = [A.table[A.inv[z0], M.action[q, z0]] for q in range(n)]
        return Cochain(1, M, vals)
    if c.degree == 1:
        z = c.values
        q1 = np.arange(n)[:, None]
        q2 = np.arange(n)[None, :]
        acted = M.action[q1, z[q2]]
        vals = A.table[A.table[z[q1], acted], A.inv[z[Q.table]]]
        return Cochain(2, M, vals)
    if c.degree == 2:
        d = c.values
        T = Q.table
        a = np.arange(n)[:, None, None]
        b = np.arange(n)[None, :, None]
        cc = np.arange(n)[None, None, :]
        t1 = M.action[a, d[b, cc]]
        t2 = A.inv[d[T[a, b], cc]]
        t3 = d[a, T[b, cc]]
        t4 = A.inv[d[a, b]]
        vals = A.table[A.table[t1, t2], A.table[t3, t4]]
        return Cochain(3, M, vals)
    raise DegreeTooHigh(f"no coboundary for degree {c.degree}")


def is_cocycle(c: Cochain) -> bool:
    M, A, Q = c.module, c.module.coeffs, c.module.actor
    if c.degree == 1:
        lam = c.values
        lhs = lam[Q.table]
        rhs = A.table[lam[:, None], M.action[np.arange(Q.order)[:, None], lam[None, :]]]
        return bool(np.array_equal(lhs, rhs))
    if c.degree in (0, 2):
        return _coboundary(c).is_zero()
    raise DegreeTooHigh(f"degree {c.degree}")


# ---------------------------------------------------------------------------
# additive encoding


def to_vector(c: Cochain) -> np.ndarray:
    co = c.module.coords
    slots = _slots(c.degree, c.module.actor.order)
    if co.rank == 0 or not slots:
        return np.zeros(0, dtype=np.int64)
    idx = [c.values[s] if s else c.values[()] for s in slots]
    return co.coords[np.array(idx, dtype=np.int64)].reshape(-1)


def from_vector(vec, degree: int, M: CoefficientModule) -> Cochain:
    co = M.coords
    out = np.zeros(_shape(degree, M.actor.order), dtype=np.int64)
    r = co.rank
    if r:
        for k, s in enumerate(_slots(degree, M.actor.order)):
            out[s] = co.decode(vec[k * r:(k + 1) * r])
    return Cochain(degree, M, out)


def coboundary_matrix(M: CoefficientModule, n: int) -> np.ndarray:
    """Integer matrix of d^n in coordinates (row-vector convention)."""
    r = M.coords.rank
    Q = M.actor
    T = M.coord_matrices
    I = np.eye(r, dtype=np.int64)
    src = _slots(n, Q.order)
    dst = _slots(n + 1, Q.order)
    sidx = {s: k for k, s in enumerate(src)}
    A = np.zeros((len(src) * r, len(dst) * r), dtype=np.int64)

    def put(slot, k, mat):
        if 0 in slot:
            return
        i = sidx[slot]
        A[i * r:(i + 1) * r, k * r:(k + 1) * r] += mat

    mul = Q.table
    for k, s in enumerate(dst):
        if n == 0:
            put((), k, T[s[0]] - I)
        elif n == 1:
            q1, q2 = s
            put((q1,), k, I)
            put((q2,), k, T[q1])
            put((int(mul[q1, q2]),), k, -I)
        elif n == 2:
            q1, q2, q3 = s
            put((q2, q3), k, T[q1])
            put((int(mul[q1, q2]), q3), k, -I)
            put((q1, int(mul[q2, q3])), k, I)
            put((q1, q2), k, -I)
        else:
            raise DegreeTooHigh(f"degree {n}")
    return A


def _relations(M: CoefficientModule, n: int) -> list[np.ndarray]:
    """Generators of the kernel of (Z/N)^a -> C^n (coordinates over-run)."""
    co = M.coords
    r = co.rank
    slots = len(_slots(n, M.actor.order))
    out = []
    for k in range(slots):
        for j, d in enumerate(co.moduli):
            if d != co.N:
                v = np.zeros(slots * r, dtype=np.int64)
                v[k * r + j] = d
                out.append(v)
    return out


def _reduce_mod(vec, moduli) -> np.ndarray:
    r = len(moduli)
    if not r:
        return np.zeros(0, dtype=np.int64)
    m = np.tile(np.array(moduli, dtype=np.int64), len(vec) // r)
    return np.asarray(vec, dtype=np.int64) % m


# ---------------------------------------------------------------------------
# cohomology


class CohomologyGroup:
    """H^n(actor, coeffs) with canonical (lexicographically least) representatives."""

    def __init__(self, n: int, M: CoefficientModule, size_bound: int = DEFAULT_SIZE_BOUND):
        if n not in (1, 2):
            raise DegreeTooHigh("cohomology is implemented in degrees 1 and 2")
        self.degree = n
        self.module = M
        co = M.coords
        self.N = co.N
        r = co.rank
        a = len(_slots(n, M.actor.order)) * r
        b = len(_slots(n + 1, M.actor.order)) * r
        if a * (a + b) > size_bound:
            raise SizeBoundExceeded(f"coboundary system of size {a}x{a + b} exceeds {size_bound}")
        self._dim = a
        self._moduli = co.moduli
        if a == 0:
            self._Z = Submodule([], 1, 0)
            self._B = Submodule([], 1, 0)
            keys = [()]
            self._solver = None
        else:
            Mn = coboundary_matrix(M, n)
            scale = np.tile(np.array([co.N // d for d in co.moduli], dtype=np.int64), b // r)
            self._Z = kernel(Mn * scale[None, :], co.N)
            rel = _relations(M, n)
            Mp = coboundary_matrix(M, n - 1) % co.N
            self._B = Submodule(list(Mp) + rel, co.N, a)
            self._solver = LinearSolver(Mp, co.N, rel)
            keys = enumerate_span(list(self._Z.basis), self._B.reduce, np.zeros(a, dtype=np.int64))
        self._keys = keys
        self._index = {k: i for i, k in enumerate(keys)}
        self.classes = [self._cochain(np.array(k, dtype=np.int64)) for k in keys]
        m = len(keys)
        t = np.zeros((m, m), dtype=np.int64)
        for i in range(m):
            for j in range(m):
                t[i, j] = self._key_index(np.array(keys[i]) + np.array(keys[j]))
        self.table = Group(t, name=f"H{n}")

    def __repr__(self):
        return f"<H^{self.degree} of order {self.order}, invariants {self.invariant_factors}>"

    def _cochain(self, vec) -> Cochain:
        return from_vector(vec, self.degree, self.module)

    def _key_index(self, vec) -> int:
        if self._dim == 0:
            return 0
        return self._index[tuple(int(x) for x in self._B.reduce(vec))]

    @property
    def order(self) -> int:
        return len(self.classes)

    def __len__(self):
        return self.order

    @cached_property
    def invariant_factors(self) -> tuple:
        return abelian_invariants(self.table)

    def add(self, i: int, j: int) -> int:
        return int(self.table.table[i, j])

    def negate(self, i: int) -> int:
        return self.table.inverse(i)

    def classify(self, c: Cochain) -> tuple[int, Cochain]:
        """Return (class index, bounding cochain b) with c = rep . d(b)."""
        if c.degree != self.degree or c.module.coeffs != self.module.coeffs:
            raise CoefficientMismatch("cochain does not belong to this cohomology group")
        if not is_cocycle(Cochain(c.degree, self.module, c.values)):
            raise NotACocycle("cannot classify a non-cocycle")
        c = Cochain(c.degree, self.module, c.values)
        if self._dim == 0:
            return 0, Cochain.zero(self.degree - 1, self.module)
        vec = to_vector(c)
        key = self._B.reduce(vec)
        idx = self._index[tuple(int(x) for x in key)]
        y = self._solver.solve(vec - key)
        if y is None:  # pragma: no cover - guarded by the Howell property
            raise NotWellDefined("bounding cochain not found")
        b = from_vector(y, self.degree - 1, self.module)
        if self.classes[idx] * coboundary(b) != c:  # pragma: no cover
            raise NotWellDefined("decomposition check failed")
        return idx, b

    def class_of(self, c: Cochain) -> int:
        return self.classify(c)[0]

    def cocycles(self) -> list[Cochain]:
        """All cocycles (not just representatives), in canonical order."""
        if self._dim == 0:
            return [Cochain.zero(self.degree, self.module)]
        keys = enumerate_span(list(self._Z.basis), lambda v: _reduce_mod(v, self._moduli),
                              np.zeros(self._dim, dtype=np.int64))
        return [self._cochain(np.array(k)) for k in keys]

    def coboundaries(self) -> list[Cochain]:
        if self._dim == 0:
            return [Cochain.zero(self.degree, self.module)]
        keys = enumerate_span(list(self._B.basis), lambda v: _reduce_mod(v, self._moduli),
                              np.zeros(self._dim, dtype=np.int64))
        return [self._cochain(np.array(k)) for k in keys]

    @property
    def cocycle_count(self) -> int:
        return self._Z.size // self._overrun

    @property
    def coboundary_count(self) -> int:
        return self._B.size // self._overrun

    @cached_property
    def _overrun(self) -> int:
        if self._dim == 0:
            return 1
        return Submodule(_relations(self.module, self.degree), self.N, self._dim).size

    def report(self) -> dict:
        return {
            "degree": self.degree,
            "order": self.order,
            "invariant_factors": list(self.invariant_factors),
            "representatives": [c.values.tolist() for c in self.classes],
        }


def cohomology(n: int, M: CoefficientModule, size_bound: int = DEFAULT_SIZE_BOUND) -> CohomologyGroup:
    return CohomologyGroup(n, M, size_bound)


# ---------------------------------------------------------------------------
# brute-force oracle (independent of the linear algebra above)


@dataclass
class BruteCohomology:
    degree: int
    module: CoefficientModule
    cocycles: list  # value tuples
    coboundaries: list
    classes: list  # list of frozensets of value tuples, ordered by least member
    table: Group

    @property
    def order(self) -> int:
        return len(self.classes)

    def class_of(self, c: Cochain) -> int:
        key = tuple(c.values.reshape(-1).tolist())
        for i, cl in enumerate(self.classes):
            if key in cl:
                return i
        raise NotACocycle("not a cocycle")

    @property
    def invariant_factors(self) -> tuple:
        return abelian_invariants(self.table)


def _all_cochains(n: int, M: CoefficientModule) -> np.ndarray:
    """Every normalized n-cochain as a (count, order**n) array of values."""
    q = M.actor.order
    slots = _slots(n, q)
    flat = [np.ravel_multi_index(s, _shape(n, q)) if s else 0 for s in slots]
    count = M.coeffs.order ** len(slots)
    k = np.arange(count, dtype=np.int64)
    digits = np.stack([(k // M.coeffs.order ** (len(slots) - 1 - j)) % M.coeffs.order
                       for j in range(len(slots))], axis=1) if slots else np.zeros((1, 0), dtype=np.int64)
    out = np.zeros((count, q ** n), dtype=np.int64)
    if slots:
        out[:, flat] = digits
    return out


def brute_force_count(n: int, M: CoefficientModule) -> int:
    return M.coeffs.order ** len(_slots(n, M.actor.order))


def _cocycle_mask(V: np.ndarray, M: CoefficientModule) -> np.ndarray:
    """Cocycle test for a batch of cochains ``V[k, ...]`` using only tables."""
    A, Q, act = M.coeffs.table, M.actor.table, M.action
    n = Q.shape[0]
    ar = np.arange(n)
    if V.ndim == 2:
        lhs = V[:, Q]
        rhs = A[V[:, :, None], act[ar[None, :, None], V[:, None, :]]]
        return (lhs == rhs).reshape(len(V), -1).all(axis=1)
    a = ar[:, None, None]
    b = ar[None, :, None]
    c = ar[None, None, :]
    lhs = A[V[:, a, b], V[:, Q[a, b], c]]
    rhs = A[act[a, V[:, b, c]], V[:, a, Q[b, c]]]
    return (lhs == rhs).reshape(len(V), -1).all(axis=1)


def brute_force_cohomology(n: int, M: CoefficientModule, limit: int = 10**6) -> BruteCohomology:
    """Enumerate every normalized cochain; only group-table arithmetic is used."""
    if brute_force_count(n, M) > limit or brute_force_count(n - 1, M) > limit:
        raise SizeBoundExceeded("too many cochains to enumerate")
    q = M.actor.order
    A = M.coeffs
    shape = _shape(n, q)
    cands = _all_cochains(n, M)
    keep = []
    for start in range(0, len(cands), 20_000):
        chunk = cands[start:start + 20_000]
        keep.append(chunk[_cocycle_mask(chunk.reshape((-1,) + shape), M)])
    Z = np.vstack(keep)
    prev = _all_cochains(n - 1, M)
    B = {tuple(_coboundary(Cochain(n - 1, M, row.reshape(_shape(n - 1, q)))).values.reshape(-1).tolist())
         for row in prev}
    Zt = sorted(tuple(r.tolist()) for r in Z)
    Bt = sorted(B)
    Barr = np.array(Bt, dtype=np.int64)
    assigned: dict = {}
    classes = []
    for z in Zt:
        if z in assigned:
            continue
        coset = A.table[np.array(z)[None, :], Barr]
        members = frozenset(tuple(r.tolist()) for r in coset)
        for mbr in members:
            assigned[mbr] = len(classes)
        classes.append(members)
    reps = [min(cl) for cl in classes]
    m = len(classes)
    t = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        for j in range(m):
            s = tuple(A.table[np.array(reps[i]), np.array(reps[j])].tolist())
            t[i, j] = assigned[s]
    return BruteCohomology(n, M, Zt, Bt, classes, Group(t))


# ---------------------------------------------------------------------------
# induced modules and actions


def least_section(pi: Homomorphism) -> tuple:
    """For every target element, its least-index preimage."""
    out = [None] * pi.target.order
    for a, b in enumerate(pi.map):
        if out[b] is None:
            out[b] = a
    return tuple(out)


def induced_theta0(M_Q: CoefficientModule, pqr) -> tuple[CoefficientModule, Homomorphism]:
    """The R-module Z(K)^P with its inclusion into Z(K).

    ``pqr`` is the extension P -> Q -> R (fields ``i`` and ``pi``).
    """
    P_in_Q = [pqr.i(p) for p in range(pqr.i.source.order)]
    fix = fixed_subgroup(M_Q, P_in_Q)
    F, incl = fix.as_group()
    R = pqr.pi.target
    pos = {m: k for k, m in enumerate(fix.members)}
    action = np.zeros((R.order, F.order), dtype=np.int64)
    done = [False] * R.order
    for q in range(M_Q.actor.order):
        r = pqr.pi(q)
        row = [pos[int(M_Q.action[q, m])] for m in fix.members]
        if not done[r]:
            action[r] = row
            done[r] = True
        elif list(action[r]) != row:
            raise NotWellDefined(f"action of R at {r} depends on the lift")
    name = f"{M_Q.coeffs.name}^P" if M_Q.coeffs.name else None
    F = Group(F.table, name=name)
    incl = Homomorphism(F, incl.target, incl.map)
    return CoefficientModule(R, F, action, name=name), incl


def q_action_on_Z1(M_Q: CoefficientModule, pqr, lam: Cochain, q: int) -> Cochain:
    """(q.lam)(p) = q(lam(q^-1 p q)) for a 1-cocycle lam on P."""
    Q = M_Q.actor
    j = pqr.i
    P = j.source
    qi = Q.inverse(q)
    inv_j = {j(p): p for p in range(P.order)}
    vals = []
    for p in range(P.order):
        conj = Q.product(qi, j(p), q)
        vals.append(M_Q.act(q, lam(inv_j[conj])))
    return Cochain(1, lam.module, vals)


@dataclass
class RActionOnH1:
    module: CoefficientModule  # R acting on the class group of H^1(P, Z(K))
    h1: CohomologyGroup
    fixed: Subgroup  # the R-fixed classes


def r_action_on_H1(M_Q: CoefficientModule, pqr, H1P: CohomologyGroup | None = None) -> RActionOnH1:
    M_P = restrict_module(M_Q, pqr.i)
    if H1P is None:
        H1P = cohomology(1, M_P)
    R = pqr.pi.target
    action = [None] * R.order
    for q in range(M_Q.actor.order):
        r = pqr.pi(q)
        row = [H1P.class_of(q_action_on_Z1(M_Q, pqr, rep, q)) for rep in H1P.classes]
        if action[r] is None:
            action[r] = row
        elif action[r] != row:
            raise NotWellDefined(f"R-action on H1 at {r} depends on the lift")
    mod = CoefficientModule(R, H1P.table, action, name="H1(P)")
    fixed = fixed_subgroup(mod, range(R.order))
    return RActionOnH1(mod, H1P, fixed)


# ---------------------------------------------------------------------------
# connecting maps


@dataclass
class ConnectingMap:
    """A homomorphism between class groups, defined on ``domain`` (a subgroup).

    ``matrix[k]`` is the image of ``domain[k]``; ``witnesses[k]`` is the
    cochain-level image together with the bounding cochain that reduces it to
    the target representative.
    """

    kind: str
    source: CohomologyGroup
    target: CohomologyGroup
    domain: tuple
    matrix: tuple
    witnesses: list = field(default_factory=list, repr=False)

    def __call__(self, a: int) -> int:
        return self.matrix[self.domain.index(a)]

    def kernel(self) -> list[int]:
        return [a for a, b in zip(self.domain, self.matrix) if b == 0]

    def image(self) -> list[int]:
        return sorted(set(self.matrix))


def verify_homomorphism(m: ConnectingMap) -> bool:
    pos = {a: k for k, a in enumerate(m.domain)}
    for a in m.domain:
        for b in m.domain:
            s = m.source.add(a, b)
            if s not in pos:
                return False
            if m.matrix[pos[s]] != m.target.add(m.matrix[pos[a]], m.matrix[pos[b]]):
                return False
    return True


def inflation(n: int, source: CohomologyGroup, target: CohomologyGroup, phibar: Homomorphism,
              coeff_map: Homomorphism | None = None) -> ConnectingMap:
    """Precompose with phibar: Q -> R and push values along coeff_map."""
    if coeff_map is None:
        coeff_map = Homomorphism(source.module.coeffs, target.module.coeffs,
                                 tuple(range(source.module.coeffs.order)))
    if coeff_map.source != source.module.coeffs or coeff_map.target != target.module.coeffs:
        raise CoefficientMismatch("coefficient map does not match the modules")
    if phibar.source != target.module.actor or phibar.target != source.module.actor:
        raise CoefficientMismatch("phibar must map the target actor onto the source actor")
    Q = target.module.actor
    for q in range(Q.order):
        for a in range(source.module.coeffs.order):
            if coeff_map(source.module.act(phibar(q), a)) != target.module.act(q, coeff_map(a)):
                raise CoefficientMismatch("coefficient inclusion is not equivariant")
    cm = coeff_map.arr
    ph = phibar.arr
    images, witnesses = [], []
    for rep in source.classes:
        if n == 1:
            vals = cm[rep.values[ph]]
        else:
            vals = cm[rep.values[ph[:, None], ph[None, :]]]
        img = Cochain(n, target.module, vals)
        idx, b = target.classify(img)
        images.append(idx)
        witnesses.append((img, b))
    return ConnectingMap("inflation", source, target, tuple(range(source.order)), tuple(images), witnesses)


def restriction(n: int, source: CohomologyGroup, target: CohomologyGroup, jbar: Homomorphism,
                fixed: Subgroup | None = None) -> ConnectingMap:
    """Precompose with the inclusion jbar: P -> Q."""
    if source.module.coeffs != target.module.coeffs:
        raise CoefficientMismatch("restriction keeps the coefficient group")
    if not np.array_equal(source.module.action[jbar.arr], target.module.action):
        raise CoefficientMismatch("target action is not the restricted action")
    j = jbar.arr
    images, witnesses = [], []
    for rep in source.classes:
        vals = rep.values[j] if n == 1 else rep.values[j[:, None], j[None, :]]
        img = Cochain(n, target.module, vals)
        idx, b = target.classify(img)
        images.append(idx)
        witnesses.append((img, b))
    if fixed is not None:
        bad = [i for i in images if i not in fixed]
        if bad:
            raise NotWellDefined(f"restriction leaves the R-fixed classes at {bad[0]}")
    return ConnectingMap("restriction", source, target, tuple(range(source.order)), tuple(images), witnesses)


def kernel_subgroup(m: ConnectingMap) -> Subgroup:
    return Subgroup(m.source.table, tuple(m.kernel()))


class SequenceData:
    """Every module and cohomology group the six-term sequence needs.

    ``M_Q`` is the Q-module Z(K); ``pqr`` the extension P -> Q -> R.
    """

    def __init__(self, M_Q: CoefficientModule, pqr, size_bound: int = DEFAULT_SIZE_BOUND):
        self.M_Q = M_Q
        self.pqr = pqr
        self.size_bound = size_bound
        self.Q = M_Q.actor
        self.P = pqr.i.source
        self.R = pqr.pi.target
        self.jbar = pqr.i
        self.phibar = pqr.pi
        self.M_P = restrict_module(M_Q, pqr.i, name="Z(K) over P")
        self.M_R, self.fix_incl = induced_theta0(M_Q, pqr)
        self.ubar = least_section(pqr.pi)
        self._jinv = {pqr.i(p): p for p in range(self.P.order)}

    def _coh(self, n, M):
        return cohomology(n, M, self.size_bound)

    @cached_property
    def H1R(self):
        return self._coh(1, self.M_R)

    @cached_property
    def H1Q(self):
        return self._coh(1, self.M_Q)

    @cached_property
    def H1P(self):
        return self._coh(1, self.M_P)

    @cached_property
    def H2R(self):
        return self._coh(2, self.M_R)

    @cached_property
    def H2Q(self):
        return self._coh(2, self.M_Q)

    @cached_property
    def H2P(self):
        return self._coh(2, self.M_P)

    @cached_property
    def r_action(self) -> RActionOnH1:
        return r_action_on_H1(self.M_Q, self.pqr, self.H1P)

    @cached_property
    def H1R_H1P(self):
        return self._coh(1, self.r_action.module)

    def p_index(self, q: int) -> int:
        return self._jinv[q]

    def lift_choices(self, r: int) -> list[int]:
        return self.phibar.preimages(r)

    # maps -----------------------------------------------------------------
    @cached_property
    def infl1(self) -> ConnectingMap:
        return inflation(1, self.H1R, self.H1Q, self.phibar, self.fix_incl)

    @cached_property
    def res1(self) -> ConnectingMap:
        return restriction(1, self.H1Q, self.H1P, self.jbar, fixed=self.r_action.fixed)

    @cached_property
    def tgr(self) -> ConnectingMap:
        dom = self.r_action.fixed.members
        images, witnesses = [], []
        for c in dom:
            res = transgression(c, self)
            images.append(res.cls)
            witnesses.append(res)
        return ConnectingMap("transgression", self.H1P, self.H2R, tuple(dom), tuple(images), witnesses)

    @cached_property
    def infl2(self) -> ConnectingMap:
        return inflation(2, self.H2R, self.H2Q, self.phibar, self.fix_incl)

    @cached_property
    def res2(self) -> ConnectingMap:
        return restriction(2, self.H2Q, self.H2P, self.jbar)

    @cached_property
    def h2p(self) -> Subgroup:
        return kernel_subgroup(self.res2)

    @cached_property
    def rd(self) -> ConnectingMap:
        dom = self.h2p.members
        images, witnesses = [], []
        for c in dom:
            res = reduction(c, self)
            images.append(res.cls)
            witnesses.append(res)
        return ConnectingMap("reduction", self.H2Q, self.H1R_H1P, tuple(dom), tuple(images), witnesses)


@dataclass
class TransgressionResult:
    cls: int
    cocycle: Cochain  # d_lambda on R with values in Z(K)^P
    z: list  # z(r) in Z(K), indexed by r
    lam: Cochain
    section: tuple
    bounding: Cochain


def transgression(lam_class: int, data: SequenceData, section: Sequence[int] | None = None,
                  lam: Cochain | None = None, z_shift: Sequence[int] | None = None) -> TransgressionResult:
    """Class of d_lambda in H^2(R, Z(K)^P).

    ``section`` overrides the lift r -> q (default: least index),
    ``lam`` a representative of the class, ``z_shift`` multiplies the solved
    z by a Z(K)^P-valued map (given as Z(K)^P indices).
    """
    if lam is None:
        lam = data.H1P.classes[lam_class]
    elif data.H1P.class_of(lam) != lam_class:
        raise ValidationError("lam is not in the given class")
    u = tuple(section) if section is not None else data.ubar
    if u[0] != 0 or any(data.phibar(u[r]) != r for r in range(data.R.order)):
        raise ValidationError("section must be a normalized section of phibar")
    A = data.M_Q.coeffs
    M = data.M_Q
    Q = data.Q
    zvals = [0] * data.R.order
    for r in range(1, data.R.order):
        q = u[r]
        moved = q_action_on_Z1(M, data.pqr, lam, q)
        diff = moved / lam
        idx, b = data.H1P.classify(diff)
        if idx != 0:
            raise NoInvarianceWitness(f"class is not invariant under r = {r}")
        zvals[r] = int(b.values)
    if z_shift is not None:
        inc = data.fix_incl
        zvals = [A.mul(z, inc(s)) for z, s in zip(zvals, z_shift)]
        zvals[0] = 0
    R = data.R
    d = np.zeros((R.order, R.order), dtype=np.int64)
    fix_pos = {m: k for k, m in enumerate(data.fix_incl.map)}
    for r1 in range(R.order):
        for r2 in range(R.order):
            r12 = R.mul(r1, r2)
            p = Q.product(Q.inverse(u[r12]), u[r1], u[r2])
            lam_term = M.act(u[r12], lam(data.p_index(p)))
            val = A.product(zvals[r1], M.act(u[r1], zvals[r2]), A.inverse(zvals[r12]), A.inverse(lam_term))
            if val not in fix_pos:
                raise NotWellDefined("d_lambda leaves Z(K)^P")
            d[r1, r2] = fix_pos[val]
    dc = Cochain(2, data.M_R, d)
    cls, bnd = data.H2R.classify(dc)
    return TransgressionResult(cls, dc, zvals, lam, u, bnd)


@dataclass
class ReductionResult:
    cls: int
    gamma: Cochain  # R -> H^1(P, Z(K)) class indices
    normalized: Cochain  # e' with e'(P, P) = 1
    retraction: Cochain  # 1-cochain on Q with e' = e / d(retraction)
    gamma_tilde: list  # Gamma~(r) as 1-cocycles on P
    lifts: tuple
    bounding: Cochain


def reduction(e_class: int, data: SequenceData, lifts: Sequence[int] | None = None,
              e: Cochain | None = None) -> ReductionResult:
    """Class of r -> [Gamma~_e(r)] in H^1(R, H^1(P, Z(K)))."""
    if e is None:
        e = data.H2Q.classes[e_class]
    elif data.H2Q.class_of(e) != e_class:
        raise ValidationError("e is not in the given class")
    j = data.jbar.arr
    e_P = Cochain(2, data.M_P, e.values[j[:, None], j[None, :]])
    idx, b = data.H2P.classify(e_P)
    if idx != 0:
        raise NotInH2P("class does not restrict to zero on P")
    # e_P = d(b); extend b to Q by zero off P and divide it out
    bt = np.zeros(data.Q.order, dtype=np.int64)
    for p in range(data.P.order):
        bt[j[p]] = b(p)
    btc = Cochain(1, data.M_Q, bt)
    e2 = e / coboundary(btc)
    if e2.values[j[:, None], j[None, :]].any():  # pragma: no cover
        raise NotWellDefined("normalization on P failed")
    u = tuple(lifts) if lifts is not None else data.ubar
    A = data.M_Q.coeffs
    Q = data.Q
    H1P = data.H1P
    gvals = [0] * data.R.order
    tildes = []
    for r in range(data.R.order):
        q = u[r]
        qi = Q.inverse(q)
        vals = [A.mul(e2(q, Q.product(qi, j[p], q)), A.inverse(e2(j[p], q))) for p in range(data.P.order)]
        gt = Cochain(1, data.M_P, vals)
        if not is_cocycle(gt):
            raise NotWellDefined(f"Gamma~({r}) is not a cocycle")
        tildes.append(gt)
        gvals[r] = H1P.class_of(gt)
    gamma = Cochain(1, data.r_action.module, gvals)
    if not is_cocycle(gamma):
        raise NotWellDefined("Gamma is not a cocycle")
    cls, bnd = data.H1R_H1P.classify(gamma)
    return ReductionResult(cls, gamma, e2, btc, tildes, u, bnd)
