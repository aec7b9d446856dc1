import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from extlab import catalog
from extlab.errors import (
    NoIdentityAtZero,
    NoInverse,
    NotAHomomorphism,
    NotAssociative,
    NotClosed,
    NotNormal,
    SearchBoundExceeded,
)
from extlab.groups import (
    Group,
    Subgroup,
    abelian_invariants,
    automorphism_group,
    center,
    coset_quotient,
    direct_product,
    find_isomorphism,
    fingerprint,
    generating_set,
    induced_maps_NK_NP,
    is_normal,
    quotient,
    homomorphisms,
    inner_automorphisms,
    make_homomorphism,
    outer_automorphisms,
    relative_automorphisms,
    subgroup_generated,
    validate_group,
)

# |Aut| for every catalog entry; orders up to 8 are re-derived below by an
# exhaustive search over permutations.
AUT_ORDERS = {
    "C1": 1, "C2": 1, "C3": 2, "C4": 2, "C6": 2, "C8": 4, "C2xC2": 6, "C2xC4": 8, "C4xC2": 8,
    "C2xC2xC2": 168, "S3": 6, "D4": 8, "Q8": 24, "A4": 24, "D6": 12,
}
INN_ORDERS = {"S3": 6, "D4": 4, "Q8": 4, "A4": 12, "D6": 6}


def brute_automorphisms(G):
    t = G.table
    n = G.order
    out = []
    for rest in itertools.permutations(range(1, n)):
        p = np.array((0,) + rest)
        if np.array_equal(p[t], t[p[:, None], p[None, :]]):
            out.append(tuple(int(x) for x in p))
    return out


def relabel(G, perm):
    """Table of G after renaming element x to perm[x] (perm[0] = 0)."""
    perm = np.asarray(perm)
    inv = np.argsort(perm)
    return perm[G.table[inv[:, None], inv[None, :]]]


@pytest.mark.parametrize("name", catalog.names())
def test_catalog_entry_valid(name):
    G = catalog.get(name)
    e = catalog.ENTRIES[name]
    assert G.order == e.order
    assert G.is_abelian == e.abelian
    validate_group(G.table)


def test_catalog_regenerates_shipped_tables():
    fresh = catalog.regenerate()
    shipped = catalog._shipped()
    assert fresh.keys() == shipped.keys()
    for name in fresh:
        assert fresh[name] == shipped[name], name


@pytest.mark.parametrize("name", catalog.names())
def test_aut_orders(name):
    assert automorphism_group(catalog.get(name)).order == AUT_ORDERS[name]


@pytest.mark.parametrize("name", [n for n in catalog.names() if catalog.ENTRIES[n].order <= 8])
def test_aut_matches_permutation_search(name):
    G = catalog.get(name)
    assert list(automorphism_group(G).elements) == sorted(brute_automorphisms(G))


@pytest.mark.parametrize("name", sorted(INN_ORDERS))
def test_inner_and_outer(name):
    G = catalog.get(name)
    inn, hom = inner_automorphisms(G)
    assert inn.order == INN_ORDERS[name]
    assert hom.kernel().members == center(G).members
    assert outer_automorphisms(G).quotient.order == AUT_ORDERS[name] // INN_ORDERS[name]


def test_validation_witnesses():
    with pytest.raises(NotClosed):
        validate_group([[0, 1], [1, 2]])
    with pytest.raises(NoIdentityAtZero):
        validate_group([[1, 0], [0, 1]])
    with pytest.raises(NoInverse) as exc:
        validate_group([[0, 1, 2], [1, 1, 1], [2, 1, 0]])
    assert exc.value.element == 1
    with pytest.raises(NotAssociative) as exc:
        validate_group([[0, 1, 2], [1, 0, 2], [2, 2, 0]])
    assert exc.value.witness == (1, 2, 2)
    with pytest.raises(NotClosed):
        validate_group([[0.5]])


def test_subgroups_and_quotients():
    D4 = catalog.get("D4")
    Z = center(D4)
    assert Z.order == 2
    cq = coset_quotient(D4, Z)
    assert find_isomorphism(cq.quotient, catalog.get("C2xC2")) is not None
    S3 = catalog.get("S3")
    refl = next(g for g in range(6) if S3.element_order(g) == 2)
    with pytest.raises(NotNormal):
        coset_quotient(S3, subgroup_generated(S3, [refl]))


def test_homomorphism_checks():
    C4, C2 = catalog.get("C4"), catalog.get("C2")
    f = make_homomorphism(C4, C2, [0, 1, 0, 1])
    assert f.kernel().members == (0, 2)
    assert f.is_surjective and not f.is_injective
    with pytest.raises(NotAHomomorphism):
        make_homomorphism(C4, C2, [0, 1, 1, 0])


@pytest.mark.parametrize("src,dst,count", [
    ("C4", "C2", 2), ("C2xC2", "C2", 4), ("S3", "C2", 2), ("C2", "S3", 4), ("Q8", "C2xC2", 16), ("C3", "A4", 9),
])
def test_homomorphism_counts(src, dst, count):
    # counts: |Hom(A, B)| by hand (e.g. elements of order dividing 2 in S3 for C2 -> S3)
    assert len(homomorphisms(catalog.get(src), catalog.get(dst))) == count


def test_search_bound():
    G = catalog.get("A4")
    with pytest.raises(SearchBoundExceeded):
        automorphism_group(G, bound=8)


def test_relative_automorphisms_s3_a3():
    S3 = catalog.get("S3")
    A3 = Subgroup(S3, [g for g in range(6) if S3.element_order(g) in (1, 3)])
    aut_k, ck, out = relative_automorphisms(S3, A3)
    assert aut_k.order == 6 and ck.order == 3 and out.quotient.order == 2


@pytest.mark.parametrize("name,inv", [
    ("C1", ()), ("C2", (2,)), ("C6", (6,)), ("C2xC2", (2, 2)), ("C2xC4", (2, 4)),
    ("C4xC2", (2, 4)), ("C2xC2xC2", (2, 2, 2)), ("C8", (8,)),
])
def test_abelian_invariants(name, inv):
    assert abelian_invariants(catalog.get(name)) == inv


def test_direct_product_and_fingerprint():
    G = direct_product(catalog.get("C2"), catalog.get("S3"))
    assert find_isomorphism(G, catalog.get("D6")) is not None
    assert catalog.identify(G) == ["D6"]
    fp = fingerprint(catalog.get("Q8"))
    assert fp["census"] == [[1, 1], [2, 1], [4, 6]]


names_st = st.sampled_from(catalog.names())


@st.composite
def relabelled(draw):
    G = catalog.get(draw(names_st))
    rest = draw(st.permutations(list(range(1, G.order))))
    perm = [0] + list(rest)
    return G, perm


@given(relabelled())
def test_relabelled_groups_are_isomorphic(case):
    G, perm = case
    H = validate_group(relabel(G, perm))
    iso = find_isomorphism(G, H)
    assert iso is not None
    make_homomorphism(G, H, iso)
    assert fingerprint(G) == fingerprint(H)
    assert automorphism_group(H).order == AUT_ORDERS[G.name]


@given(names_st, st.data())
def test_generated_subgroups_are_closed(name, data):
    G = catalog.get(name)
    gens = data.draw(st.lists(st.integers(0, G.order - 1), max_size=3))
    H = subgroup_generated(G, gens)
    mem = set(H.members)
    assert all(G.mul(a, b) in mem for a in mem for b in mem)
    assert G.order % H.order == 0
    assert set(gens) <= mem


@given(names_st)
def test_generating_set_generates(name):
    G = catalog.get(name)
    assert subgroup_generated(G, generating_set(G)).order == G.order


@given(names_st, names_st)
def test_homomorphisms_compose(a, b):
    G, H = catalog.get(a), catalog.get(b)
    if G.order * H.order > 64:
        return
    for m in homomorphisms(G, H)[:5]:
        f = make_homomorphism(G, H, m)
        assert f.kernel().order * f.image().order == G.order


def _hom_on_all_pairs(h):
    S, T = h.source, h.target
    return all(
        h.map[S.table[a, b]] == T.table[h.map[a], h.map[b]]
        for a in range(S.order) for b in range(S.order)
    )


@pytest.mark.parametrize("name,korder", [("D4", 2), ("S3", 3), ("Q8", 2), ("Q8", 4), ("D4", 4)])
def test_induced_maps_are_homomorphisms(name, korder):
    N = catalog.get(name)
    for K in {h.members: h for h in (subgroup_generated(N, [g]) for g in range(N.order))}.values():
        if K.order == korder and is_normal(N, K):
            break
    P, pi = quotient(N, K)
    m = induced_maps_NK_NP(N, K, P, pi)
    for h in (m.nk, m.np_, m.out_nk, m.out_np):
        assert _hom_on_all_pairs(h)
    # restriction to K really is restriction, and the quotient action commutes with pi
    for idx, p in enumerate(m.aut_k.elements):
        assert m.aut_K.elements[m.nk.map[idx]] == m.restrict_to_K(p)
        q = m.aut_P.elements[m.np_.map[idx]]
        assert all(pi.map[p[n]] == q[pi.map[n]] for n in range(N.order))


def test_induced_maps_s3_a3():
    S = catalog.get("S3")
    A = next(h for h in (subgroup_generated(S, [g]) for g in range(6)) if h.order == 3)
    P, pi = quotient(S, A)
    m = induced_maps_NK_NP(S, A, P, pi)
    assert m.out.quotient.order == 2
    # the outer class acts on A3 by inversion and trivially on S3/A3
    assert m.out_nk.map == (0, 1)
    assert m.out_np.map == (0, 0)
