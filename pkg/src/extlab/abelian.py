"""Linear algebra over Z/N via the Howell normal form.

A finite abelian group of exponent N is written in invariant-factor
coordinates, so cochain groups become quotients of (Z/N)^k and every object
the cohomology code needs (kernels, images, canonical coset
representatives) is a submodule of (Z/N)^k.  The Howell form of a
submodule is an echelon basis with the extra property that every element
whose first ``c`` entries vanish is spanned by the basis rows starting after
column ``c``.  Greedy reduction against it therefore yields the
lexicographically least member of a coset.
"""
from __future__ import annotations

from math import gcd
from typing import Iterable, Iterator

import numpy as np


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def _normalizing_unit(a: int, N: int) -> int:
    """A unit u mod N with u*a = gcd(a, N) mod N."""
    d = gcd(a, N)
    for u in range(1, N):
        if gcd(u, N) == 1 and (u * a) % N == d:
            return u
    raise ArithmeticError(f"no normalizing unit for {a} mod {N}")  # pragma: no cover


def howell_form(A, N: int) -> tuple[np.ndarray, list[int]]:
    """Howell basis of the row span of ``A`` over Z/N and its pivot columns."""
    A = np.asarray(A, dtype=np.int64)
    if A.ndim == 1:
        A = A[None, :]
    m = A.shape[1]
    if N == 1 or A.size == 0:
        return np.zeros((0, m), dtype=np.int64), []
    W = A % N
    W = W[np.any(W != 0, axis=1)]
    rows: list[np.ndarray] = []
    cols: list[int] = []
    for c in range(m):
        if W.shape[0] == 0:
            break
        nz = np.nonzero(W[:, c])[0]
        if len(nz) == 0:
            continue
        piv = W[nz[0]].copy()
        spill = []
        for k in nz[1:]:
            r = W[k]
            a, b = int(piv[c]), int(r[c])
            g, s, t = xgcd(a, b)
            piv, r2 = (s * piv + t * r) % N, ((b // g) * piv - (a // g) * r) % N
            spill.append(r2)
        piv = (_normalizing_unit(int(piv[c]), N) * piv) % N
        d = int(piv[c])
        spill.append(((N // d) * piv) % N)
        mask = np.ones(W.shape[0], dtype=bool)
        mask[nz] = False
        W = np.vstack([W[mask]] + [s[None, :] for s in spill])
        W = W[np.any(W != 0, axis=1)]
        rows.append(piv)
        cols.append(c)
    for i, c in enumerate(cols):
        d = int(rows[i][c])
        for j in range(i):
            q = int(rows[j][c]) // d
            if q:
                rows[j] = (rows[j] - q * rows[i]) % N
    H = np.array(rows, dtype=np.int64).reshape(len(rows), m)
    return H, cols


class Submodule:
    """Row span of a set of generators inside (Z/N)^m."""

    def __init__(self, gens, N: int, m: int):
        self.N = int(N)
        self.m = int(m)
        g = np.asarray(gens, dtype=np.int64).reshape(-1, m) if len(gens) else np.zeros((0, m), dtype=np.int64)
        self.basis, self.pivots = howell_form(g, self.N)

    def reduce(self, v) -> np.ndarray:
        """Lexicographically least element of ``v + self``."""
        v = np.asarray(v, dtype=np.int64) % self.N
        for row, c in zip(self.basis, self.pivots):
            q = int(v[c]) // int(row[c])
            if q:
                v = (v - q * row) % self.N
        return v

    def __contains__(self, v) -> bool:
        return not self.reduce(v).any()

    @property
    def size(self) -> int:
        out = 1
        for row, c in zip(self.basis, self.pivots):
            out *= self.N // int(row[c])
        return out

    def elements(self) -> Iterator[np.ndarray]:
        """Every element exactly once."""
        ranges = [self.N // int(row[c]) for row, c in zip(self.basis, self.pivots)]
        coeff = np.zeros(len(ranges), dtype=np.int64)
        while True:
            yield (coeff @ self.basis) % self.N if len(ranges) else np.zeros(self.m, dtype=np.int64)
            k = 0
            while k < len(ranges):
                coeff[k] += 1
                if coeff[k] < ranges[k]:
                    break
                coeff[k] = 0
                k += 1
            if k == len(ranges):
                return


def kernel(M, N: int) -> Submodule:
    """{x in (Z/N)^a : x M = 0 mod N} for an a x b integer matrix."""
    M = np.asarray(M, dtype=np.int64) % N
    a, b = M.shape
    aug = np.hstack([M, np.eye(a, dtype=np.int64)])
    H, cols = howell_form(aug, N)
    gens = [row[b:] for row, c in zip(H, cols) if c >= b]
    return Submodule(gens, N, a)


class LinearSolver:
    """Solve x M = t over Z/N, with t taken modulo extra target relations."""

    def __init__(self, M, N: int, target_relations: Iterable = ()):
        M = np.asarray(M, dtype=np.int64) % N
        self.N = N
        self.a, self.b = M.shape
        rels = [np.concatenate([np.asarray(r, dtype=np.int64), np.zeros(self.a, dtype=np.int64)])
                for r in target_relations]
        aug = np.hstack([M, np.eye(self.a, dtype=np.int64)])
        if rels:
            aug = np.vstack([aug, np.array(rels)])
        self.sub = Submodule(aug, N, self.a + self.b)

    def solve(self, t) -> np.ndarray | None:
        v = np.concatenate([np.asarray(t, dtype=np.int64) % self.N, np.zeros(self.a, dtype=np.int64)])
        r = self.sub.reduce(v)
        if r[: self.b].any():
            return None
        return (-r[self.b:]) % self.N


def enumerate_span(gens, reduce, zero) -> list[tuple]:
    """All elements of the group generated by ``gens`` under ``reduce``-keys.

    ``reduce`` maps a vector to its canonical key vector; returns the sorted
    list of keys (as tuples).
    """
    start = tuple(int(x) for x in reduce(zero))
    seen = {start}
    frontier = [np.array(start)]
    gens = [np.asarray(g, dtype=np.int64) for g in gens]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple(int(x) for x in reduce(v + g))
                if w not in seen:
                    seen.add(w)
                    nxt.append(np.array(w))
        frontier = nxt
    return sorted(seen)
