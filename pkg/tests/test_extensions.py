import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cases import _ext, base_extensions
from extlab import catalog
from extlab.cochain import Cochain
from extlab.errors import (
    NotALifting,
    NotACocycle,
    NotNormalInQ,
    NotSurjective,
    OuterActionMismatch,
    ExactnessFailure,
)
from extlab.extensions import (
    are_isomorphic_extensions,
    brute_force_aut_KGQ,
    brute_force_extension_isomorphism,
    classify_extensions,
    delta_section,
    extension_automorphisms,
    extension_difference,
    factor_set,
    make_extension,
    outer_action,
    p_subextension,
    restriction_of_difference,
    twist_extension,
)
from extlab.groups import Subgroup, fingerprint, make_homomorphism

BASES = base_extensions()
# |H^2(Q, Z(K))| for each base; independent check is the number of
# isomorphism classes found by the brute-force extension isomorphism search
# below (each pair of classes is tested for an isomorphism over K and Q).
CLASS_COUNTS = {
    "C2.C2": 2, "C2.C2xC2": 8, "C2.C4": 2, "C3.C2": 1, "C4.C2": 2, "C2.S3": 2,
    "C2xC2.C3": 1, "C2.C2xC2(Q8)": 8, "S3.C2": 1,
}


def c4_over_c2():
    return _ext("C2", "C4", "C2", [0, 2])


def test_make_extension_examples():
    c4_over_c2()
    BASES["C2.C2"]
    K, G, Q = catalog.get("C2"), catalog.get("C4"), catalog.get("C2")
    with pytest.raises((NotSurjective, ExactnessFailure)):
        make_extension(K, catalog.get("C2xC4"), Q, [0, 4], [0] * 8)


def test_outer_action_examples():
    assert outer_action(BASES["C2.C2"]).is_trivial()
    assert outer_action(BASES["C2.C2xC2(Q8)"]).is_trivial()
    th = outer_action(BASES["C3.C2"])
    assert not th.is_trivial()
    assert th.center_module.action[1].tolist() == [0, 2, 1]


def test_delta_section_s3():
    ext = BASES["C3.C2"]
    se = delta_section(ext)
    t = se.s(1)
    assert ext.G.element_order(t) == 2
    bad = [tuple(range(3)), tuple(range(3))]
    with pytest.raises(NotALifting):
        delta_section(ext, bad)


def test_factor_set_c4():
    ext = c4_over_c2()
    h = factor_set(delta_section(ext))
    assert ext.i(h(1, 1)) == 2
    assert h.is_valid()
    split = factor_set(delta_section(BASES["C2.C2"]))
    assert not split.values.any()


@pytest.mark.parametrize("name", sorted(BASES))
def test_factor_sets_are_cocycles(name):
    assert factor_set(delta_section(BASES[name])).is_valid()


def test_twist_examples():
    base = BASES["C2.C2"]
    th = outer_action(base)
    se = delta_section(base, theta=th)
    M = th.center_module
    zero = twist_extension(Cochain.zero(2, M), se)
    assert np.array_equal(zero.ext.G.table, base.G.table)
    tw = twist_extension(Cochain(2, M, [[0, 0], [0, 1]]), se)
    assert fingerprint(tw.ext.G)["census"] == [[1, 1], [2, 1], [4, 2]]
    assert (tw.ext.G.table[0] == np.arange(4)).all()
    c2xc4 = _ext("C2", "C2xC4", "C4", [0, 4])
    M4 = outer_action(c2xc4).center_module
    bad = np.zeros((4, 4), dtype=int)
    bad[1, 1] = 1
    with pytest.raises(NotACocycle):
        twist_extension(Cochain(2, M4, bad), delta_section(c2xc4))


def test_difference_examples():
    a, b = BASES["C2.C2"], c4_over_c2()
    assert extension_difference(a, a).cls == 0
    assert extension_difference(b, a).cls == 1
    with pytest.raises(OuterActionMismatch):
        extension_difference(BASES["C3.C2"], _ext("C3", "C6", "C2", [0, 2, 4]))


@pytest.mark.parametrize("name", sorted(BASES))
def test_classification(name):
    recs = classify_extensions(BASES[name])
    assert len(recs) == CLASS_COUNTS[name]
    assert recs[0].cocycle.is_zero()
    base = BASES[name]
    exts = [r.sectioned.ext for r in recs]
    for k, e in enumerate(exts):
        assert extension_difference(e, base).cls == k
        validate = e.G.table
        assert validate.shape == base.G.table.shape
    if base.G.order <= 12:
        for x in range(len(exts)):
            for y in range(x + 1, len(exts)):
                assert brute_force_extension_isomorphism(exts[x], exts[y]) is None


def test_classification_examples():
    groups = [r.identified for r in classify_extensions(BASES["C2.C2"])]
    assert groups == [["C2xC2"], ["C4"]]
    ids = [tuple(r.identified) for r in classify_extensions(BASES["C2.C2xC2"])]
    assert ("D4",) in ids and ("Q8",) in ids
    assert len(classify_extensions(_ext("C2", "C2", "C1", [0, 1]))) == 1


@pytest.mark.parametrize("name", sorted(BASES))
def test_difference_antisymmetry(name):
    recs = classify_extensions(BASES[name])
    for r1 in recs:
        for r2 in recs:
            d12 = extension_difference(r1.sectioned.ext, r2.sectioned.ext)
            d21 = extension_difference(r2.sectioned.ext, r1.sectioned.ext)
            assert d12.H2.add(d12.cls, d21.cls) == 0


@pytest.mark.parametrize("name", sorted(BASES))
def test_torsor_compatibility(name):
    base = BASES[name]
    th = outer_action(base)
    se = delta_section(base, theta=th)
    H2 = extension_difference(base, base).H2
    for e1 in H2.classes:
        for e2 in H2.classes:
            inner = twist_extension(e2, se, th)
            nested = twist_extension(e1, inner, outer_action(inner.ext))
            direct = twist_extension(e1 * e2, se, th)
            assert np.array_equal(nested.ext.G.table, direct.ext.G.table)
            assert np.array_equal(factor_set(nested).values, factor_set(direct).values)


@pytest.mark.parametrize("name", sorted(BASES))
def test_isomorphism_agrees_with_brute_force(name):
    base = BASES[name]
    if base.G.order > 16:
        return
    recs = classify_extensions(base)
    for r1 in recs:
        for r2 in recs:
            a, b = r1.sectioned.ext, r2.sectioned.ext
            fast = are_isomorphic_extensions(a, b)
            slow = brute_force_extension_isomorphism(a, b)
            assert (fast is None) == (slow is None)
            if fast is not None:
                assert all(fast(a.i(k)) == b.i(k) for k in range(a.K.order))
                assert all(b.pi(fast(g)) == a.pi(g) for g in range(a.G.order))


def test_relabelled_c4_is_isomorphic():
    ext = c4_over_c2()
    # swap the generators 1 and 3 of Z/4
    perm = [0, 3, 2, 1]
    G = ext.G
    t = np.array(perm)[G.table[np.array(perm)[:, None], np.array(perm)[None, :]]]
    G2 = type(G)(t, name="C4'")
    ext2 = make_extension(ext.K, G2, ext.Q, ext.i.map, [ext.pi(perm[g]) for g in range(4)])
    assert are_isomorphic_extensions(ext, ext2) is not None
    assert brute_force_extension_isomorphism(ext, ext2) is not None


def test_aut_dictionary_c4():
    d = extension_automorphisms(c4_over_c2())
    nontrivial = [xi for xi in d.automorphisms if xi != (0, 1, 2, 3)]
    assert nontrivial == [(0, 3, 2, 1)]
    assert sorted(d.automorphisms) == sorted(brute_force_aut_KGQ(c4_over_c2()))


@pytest.mark.parametrize("name", sorted(BASES))
def test_aut_dictionary(name):
    ext = BASES[name]
    d = extension_automorphisms(ext)
    assert d.check() == []
    assert sorted(d.automorphisms) == sorted(brute_force_aut_KGQ(ext))
    zero = Cochain.zero(1, d.module)
    assert d.forward(zero) == tuple(range(ext.G.order))
    # d(z0) corresponds to conjugation by z0^-1
    from extlab.cochain import coboundary
    for z0 in range(d.module.coeffs.order):
        dz = coboundary(Cochain(0, d.module, z0))
        assert d.forward(dz) == d.coboundary_image(z0)


def test_p_subextension_examples():
    ext = _ext("C2", "C8", "C4", [0, 4])
    Q = ext.Q
    knp, j = p_subextension(ext, Subgroup(Q, (0, 2)))
    assert knp.G.order == 4
    full, _ = p_subextension(ext, Subgroup(Q, tuple(range(4))))
    assert full.G.order == 8
    triv, _ = p_subextension(ext, Subgroup(Q, (0,)))
    assert triv.G.order == 2
    S3 = catalog.get("S3")
    e = _ext("C1", S3, S3, [0])
    refl = next(g for g in range(6) if S3.element_order(g) == 2)
    with pytest.raises(NotNormalInQ):
        p_subextension(e, Subgroup(S3, (0, refl)))


def test_restriction_of_difference_z8():
    z8 = _ext("C2", "C8", "C4", [0, 4])
    c4c2 = _ext("C2", "C2xC4", "C4", [0, 4])
    P = Subgroup(z8.Q, (0, 2))
    rd = restriction_of_difference(z8, c4c2, P)
    assert rd.agree
    assert restriction_of_difference(z8, z8, P).via_restriction == 0


@pytest.mark.parametrize("name", sorted(BASES))
def test_restriction_of_difference_all_p(name):
    from extlab.groups import is_normal, subgroup_generated
    base = BASES[name]
    recs = classify_extensions(base)
    Q = base.Q
    Ps = {subgroup_generated(Q, [q]).members for q in range(Q.order)}
    for members in sorted(Ps):
        P = Subgroup(Q, members)
        if not is_normal(Q, P):
            continue
        for r in recs:
            assert restriction_of_difference(r.sectioned.ext, base, P).agree


@settings(max_examples=20)
@given(st.sampled_from(sorted(BASES)), st.data())
def test_twist_roundtrip_property(name, data):
    base = BASES[name]
    th = outer_action(base)
    se = delta_section(base, theta=th)
    H2 = extension_difference(base, base).H2
    k = data.draw(st.integers(0, H2.order - 1))
    cob = H2.coboundaries()
    b = cob[data.draw(st.integers(0, len(cob) - 1))]
    tw = twist_extension(H2.classes[k] * b, se, th)
    assert extension_difference(tw.ext, base).cls == k
