import itertools

import numpy as np
from hypothesis import given, strategies as st

from extlab.abelian import LinearSolver, Submodule, howell_form, kernel, xgcd


def span(gens, N, m):
    """Row span over Z/N by closure, as a set of tuples."""
    out = {(0,) * m}
    frontier = list(out)
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((a + b) % N for a, b in zip(v, g))
                if w not in out:
                    out.add(w)
                    nxt.append(w)
        frontier = nxt
    return out


@st.composite
def systems(draw):
    N = draw(st.sampled_from([2, 3, 4, 6, 8, 9, 12]))
    m = draw(st.integers(1, 3))
    k = draw(st.integers(0, 3))
    gens = [draw(st.lists(st.integers(0, N - 1), min_size=m, max_size=m)) for _ in range(k)]
    v = draw(st.lists(st.integers(0, N - 1), min_size=m, max_size=m))
    return N, m, gens, v


def test_xgcd():
    for a in range(-12, 13):
        for b in range(-12, 13):
            g, s, t = xgcd(a, b)
            assert g == np.gcd(a, b) and s * a + t * b == g


def test_howell_small_example():
    # 2 * (2, 1) = (0, 2) over Z/4, so the Howell basis must list it as a row
    H, cols = howell_form([[2, 1]], 4)
    assert [tuple(r) for r in H] == [(2, 1), (0, 2)]
    assert cols == [0, 1]


@given(systems())
def test_submodule_matches_closure(case):
    N, m, gens, v = case
    S = Submodule(gens, N, m)
    members = span(gens, N, m)
    assert S.size == len(members)
    assert {tuple(int(x) for x in e) for e in S.elements()} == members
    coset = {tuple((a + b) % N for a, b in zip(v, s)) for s in members}
    assert tuple(int(x) for x in S.reduce(v)) == min(coset)
    assert (tuple(v) in members) == (tuple(x % N for x in v) in S)


@given(systems())
def test_kernel_matches_enumeration(case):
    N, m, gens, _ = case
    if not gens:
        return
    M = np.array(gens).T  # m x k
    K = kernel(M, N)
    brute = {x for x in itertools.product(range(N), repeat=m) if not ((np.array(x) @ M) % N).any()}
    assert K.size == len(brute)
    assert {tuple(int(y) for y in e) for e in K.elements()} == brute


@given(systems())
def test_solver(case):
    N, m, gens, v = case
    if not gens:
        return
    M = np.array(gens)  # k x m: solve x M = v
    x = LinearSolver(M, N).solve(v)
    reachable = tuple(v) in span(gens, N, m)
    assert (x is not None) == reachable
    if x is not None:
        assert np.array_equal((x @ M) % N, np.array(v) % N)
