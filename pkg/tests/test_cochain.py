import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cases import catalog_modules, cochain_count
from extlab import catalog
from extlab.cochain import (
    Cochain,
    CoefficientModule,
    ConnectingMap,
    brute_force_cohomology,
    coboundary,
    cohomology,
    induced_theta0,
    is_cocycle,
    q_action_on_Z1,
    r_action_on_H1,
    reduction,
    transgression,
    verify_homomorphism,
)
from extlab.errors import DegreeTooHigh, NotInH2P, SizeBoundExceeded
from extlab.sixterm import get_instance, sequence_data

C2, C3, C4 = (catalog.get(n) for n in ("C2", "C3", "C4"))
INVERT_C4 = CoefficientModule(C2, C4, [[0, 1, 2, 3], [0, 3, 2, 1]])
INVERT_C3 = CoefficientModule(C2, C3, [[0, 1, 2], [0, 2, 1]])

# Orders of H^2(G, Z/2) with trivial action.  Oracle: the universal
# coefficient theorem, |Hom(M(G), Z/2)| * |Ext(G_ab, Z/2)| with M(G) the Schur
# multiplier (trivial for cyclic groups and Q8, Z/2 for D4, A4, D6, C2xC2 and
# C2xC4, (Z/2)^3 for (Z/2)^3).
H2_TRIVIAL_C2 = {
    "C2": 2, "C4": 2, "C8": 2, "S3": 2, "C2xC2": 8, "C2xC4": 8, "Q8": 4, "D4": 8, "A4": 2, "D6": 8,
    "C2xC2xC2": 64,
}


def instances():
    return ["z8", "c2-klein", "z4-klein", "z4-c16", "z3-inversion", "s3-klein", "d4"]


def test_coboundary_examples():
    z0 = Cochain(0, INVERT_C4, 1)
    assert coboundary(z0).values.tolist() == [0, 2]
    triv = CoefficientModule.trivial(C4, C2)
    assert coboundary(Cochain(0, triv, 1)).is_zero()
    assert coboundary(Cochain.zero(1, triv)).is_zero()
    with pytest.raises(DegreeTooHigh):
        coboundary(Cochain.zero(2, triv))


def test_is_cocycle_examples():
    M = CoefficientModule.trivial(C2, C2)
    assert is_cocycle(Cochain(2, M, [[0, 0], [0, 1]]))
    bad = Cochain(1, CoefficientModule.trivial(C4, C2), [0, 1, 1, 0])
    assert not is_cocycle(bad)
    assert is_cocycle(Cochain(1, CoefficientModule.trivial(C4, C2), [0, 1, 0, 1]))


def test_cohomology_examples():
    M = CoefficientModule.trivial(C2, C2)
    assert cohomology(1, M).order == 2 and cohomology(2, M).order == 2
    C1 = catalog.get("C1")
    for n in (1, 2):
        assert cohomology(n, CoefficientModule.trivial(C1, C4)).order == 1
    assert cohomology(2, CoefficientModule.trivial(C4, C4)).invariant_factors == (4,)
    assert cohomology(1, INVERT_C3).order == 1 and cohomology(2, INVERT_C3).order == 1
    assert cohomology(1, INVERT_C4).invariant_factors == (2,)
    with pytest.raises(DegreeTooHigh):
        cohomology(3, M)
    with pytest.raises(SizeBoundExceeded):
        cohomology(2, CoefficientModule.trivial(catalog.get("D6"), C2), size_bound=1000)


@pytest.mark.parametrize("name,order", sorted(H2_TRIVIAL_C2.items()))
def test_h2_with_z2_coefficients(name, order):
    assert cohomology(2, CoefficientModule.trivial(catalog.get(name), C2)).order == order


def test_class_zero_is_zero_and_reps_distinct():
    for M in catalog_modules()[:60]:
        for n in (1, 2):
            H = cohomology(n, M)
            assert H.classes[0].is_zero()
            assert len({c for c in H.classes}) == H.order
            for i, c in enumerate(H.classes):
                assert H.class_of(c) == i


def _small_modules():
    return [M for M in catalog_modules() if cochain_count(2, M) <= 5000]


@pytest.mark.parametrize("M", _small_modules(), ids=lambda M: M.name)
def test_cohomology_matches_enumeration(M):
    for n in (1, 2):
        H, B = cohomology(n, M), brute_force_cohomology(n, M)
        assert H.order == B.order
        assert H.invariant_factors == B.invariant_factors
        assert H.cocycle_count == len(B.cocycles)
        assert H.coboundary_count == len(B.coboundaries)
        sigma = [B.class_of(c) for c in H.classes]
        assert sorted(sigma) == list(range(B.order))


@pytest.mark.parametrize("M", _small_modules(), ids=lambda M: M.name)
def test_dd_is_zero_exhaustively(M):
    q, a = M.actor.order, M.coeffs.order
    for z0 in range(a):
        assert coboundary(coboundary(Cochain(0, M, z0))).is_zero()
    if a ** (q - 1) > 5000:
        return
    for rest in itertools.product(range(a), repeat=q - 1):
        c = Cochain(1, M, (0,) + rest)
        assert is_cocycle(coboundary(c))


module_st = st.sampled_from(catalog_modules())


@given(module_st, st.data())
def test_classify_decomposition(M, data):
    n = data.draw(st.sampled_from([1, 2]))
    H = cohomology(n, M)
    i = data.draw(st.integers(0, H.order - 1))
    if n == 1:
        b = Cochain(0, M, data.draw(st.integers(0, M.coeffs.order - 1)))
    else:
        rest = data.draw(st.lists(st.integers(0, M.coeffs.order - 1), min_size=M.actor.order - 1,
                                  max_size=M.actor.order - 1))
        b = Cochain(1, M, [0] + rest)
    c = H.classes[i] * coboundary(b)
    idx, w = H.classify(c)
    assert idx == i
    assert H.classes[idx] * coboundary(w) == c


@given(module_st, st.data())
def test_class_group_law(M, data):
    H = cohomology(2, M)
    i = data.draw(st.integers(0, H.order - 1))
    j = data.draw(st.integers(0, H.order - 1))
    assert H.class_of(H.classes[i] * H.classes[j]) == H.add(i, j)
    assert H.class_of(H.classes[i].inverse()) == H.negate(i)


def test_induced_theta0_inversion():
    inst = get_instance("z3-inversion")
    M_R, _ = induced_theta0(inst.theta.center_module, inst.pqr)
    assert M_R.coeffs.order == 3
    assert not M_R.is_trivial_action


def test_p_conjugation_is_coboundary():
    # for p0 in P, p0 . lam = d(lam(p0)) * lam
    for name in instances():
        data = sequence_data(get_instance(name))
        P = data.pqr.i
        for lam in data.H1P.cocycles():
            for p0 in range(data.P.order):
                moved = q_action_on_Z1(data.M_Q, data.pqr, lam, P(p0))
                z0 = Cochain(0, data.M_P, lam(p0))
                assert moved == coboundary(z0) * lam


@pytest.mark.parametrize("name", instances())
def test_connecting_maps_are_homomorphisms(name):
    data = sequence_data(get_instance(name))
    for m in (data.infl1, data.res1, data.tgr, data.infl2, data.res2, data.rd):
        assert verify_homomorphism(m)
    fixed = set(data.r_action.fixed.members)
    assert set(data.res1.matrix) <= fixed
    assert not [a for a in data.infl1.kernel() if a != 0]


def test_corrupted_map_is_not_a_homomorphism():
    data = sequence_data(get_instance("c2-klein"))
    m = data.res1
    bad = ConnectingMap(m.kind, m.source, m.target, m.domain, (0, 1, 0, 0))
    assert not verify_homomorphism(bad)


def test_r_action_trivial_for_z4():
    data = sequence_data(get_instance("z8"))
    act = r_action_on_H1(data.M_Q, data.pqr)
    assert act.module.is_trivial_action
    assert act.fixed.order == 2


def test_transgression_z8_nonzero():
    data = sequence_data(get_instance("z8"))
    assert transgression(1, data).cls == 1
    assert transgression(0, data).cls == 0


def test_reduction_rejects_classes_outside_h2p():
    data = sequence_data(get_instance("c2-klein"))
    bad = [e for e in range(data.H2Q.order) if e not in set(data.h2p.members)]
    assert bad
    with pytest.raises(NotInH2P):
        reduction(bad[0], data)


def test_rd_nonzero_somewhere_on_c2_klein():
    data = sequence_data(get_instance("c2-klein"))
    values = [reduction(e, data).cls for e in data.h2p.members]
    assert any(values)
    for e in data.infl2.matrix:
        assert reduction(e, data).cls == 0


def _other_sections(data):
    choices = [data.lift_choices(r) for r in range(data.R.order)]
    return [tuple(s) for s in itertools.product(*choices) if s[0] == 0]


@pytest.mark.parametrize("name", instances())
def test_transgression_choice_independence(name):
    data = sequence_data(get_instance(name))
    fix = data.H1P.order
    for lam_class in data.r_action.fixed.members:
        base = transgression(lam_class, data).cls
        for u in _other_sections(data):
            assert transgression(lam_class, data, section=u).cls == base
        for b in range(data.M_P.coeffs.order):
            lam = data.H1P.classes[lam_class] * coboundary(Cochain(0, data.M_P, b))
            assert transgression(lam_class, data, lam=lam).cls == base
        for shift in itertools.product(range(data.M_R.coeffs.order), repeat=data.R.order - 1):
            assert transgression(lam_class, data, z_shift=(0,) + shift).cls == base
    assert fix >= 1


@pytest.mark.parametrize("name", instances())
def test_reduction_choice_independence(name):
    data = sequence_data(get_instance(name))
    for e_class in data.h2p.members:
        base = reduction(e_class, data).cls
        for u in _other_sections(data):
            assert reduction(e_class, data, lifts=u).cls == base
        for b in data.H2Q.coboundaries()[:16]:
            e = data.H2Q.classes[e_class] * b
            assert reduction(e_class, data, e=e).cls == base
