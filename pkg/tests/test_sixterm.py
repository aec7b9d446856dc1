import copy
import json

import numpy as np
import pytest

from cases import cochain_count
from extlab.cochain import Cochain, brute_force_cohomology
from extlab.errors import MalformedCertificate, ValidationError
from extlab.sixterm import (
    MUTATIONS,
    PROPOSITIONS,
    build_sequence,
    dumps,
    get_instance,
    orders,
    replay_certificate,
    replay_report,
    run_propositions,
    sequence_data,
    standard_instances,
)

# Node orders: H^1(R, Z(K)^P), H^1(Q, Z(K)), H^1(P, Z(K))^R, H^2(R, Z(K)^P),
# H^2_P(Q, Z(K)), H^1(R, H^1(P, Z(K))).  The ambient cohomology groups are
# re-derived by enumeration in test_node_orders_match_enumeration.
ORDERS = {
    "z8": (2, 2, 2, 2, 1, 2),
    "c2-klein": (2, 4, 2, 2, 4, 2),
    "z4-klein": (2, 4, 2, 2, 4, 2),
    "z4-c16": (2, 4, 2, 2, 2, 2),
    "z3-inversion": (1, 1, 1, 1, 1, 1),
    "s3-klein": (1, 1, 1, 1, 1, 1),
    "d4": (2, 4, 2, 2, 4, 2),
    "c2-d4": (2, 4, 2, 2, 2, 1),
}
# matrices of infl1, res1, tgr, infl2, rd in canonical class order
MATRICES = {
    "z8": ([0, 1], [0, 0], [0, 1], [0, 0], [0]),
    "c2-klein": ([0, 1], [0, 0, 1, 1], [0, 0], [0, 1], [0, 0, 1, 1]),
    "z4-klein": ([0, 1], [0, 0, 1, 1], [0, 0], [0, 1], [0, 0, 1, 1]),
    "z4-c16": ([0, 2], [0, 1, 0, 1], [0, 0], [0, 2], [0, 0]),
    "d4": ([0, 3], [0, 1, 1, 0], [0, 0], [0, 5], [0, 1, 0, 1]),
    "c2-d4": ([0, 1], [0, 0, 3, 3], [0, 0], [0, 2], [0, 0]),
}

NAMES = sorted(standard_instances())
LIMIT = 10**6


@pytest.fixture(scope="module")
def certs():
    return {n: build_sequence(get_instance(n)) for n in NAMES}


def test_every_instance_has_frozen_values():
    assert set(NAMES) == set(ORDERS)


@pytest.mark.parametrize("name", NAMES)
def test_orders_and_verdict(certs, name):
    c = certs[name]
    assert orders(c) == ORDERS[name]
    assert c["verdict"] == {"exact": True, "propositions": True, "ok": True}
    assert all(e["holds"] for e in c["exactness"])
    assert all(p["passed"] for p in c["propositions"])
    assert [p["name"] for p in c["propositions"]] == [name for name, _ in PROPOSITIONS]


@pytest.mark.parametrize("name", sorted(MATRICES))
def test_map_matrices(certs, name):
    assert tuple(m["matrix"] for m in certs[name]["maps"]) == MATRICES[name]


@pytest.mark.parametrize("name", NAMES)
def test_node_orders_match_enumeration(name):
    data = sequence_data(get_instance(name))
    for H in (data.H1R, data.H1Q, data.H1P, data.H2R, data.H2Q):
        if cochain_count(H.degree, H.module) > LIMIT:
            continue  # H^2(D4, C2) has order 8 by the universal coefficient theorem
        B = brute_force_cohomology(H.degree, H.module)
        assert B.order == H.order


@pytest.mark.parametrize("name", NAMES)
def test_inflation_and_restriction_by_enumeration(name):
    """infl and res recomputed by precomposition and oracle classification."""
    data = sequence_data(get_instance(name))
    phibar, jbar, inc = data.phibar.arr, data.jbar.arr, data.fix_incl.arr
    for n, H_src, H_dst, m in ((1, data.H1R, data.H1Q, data.infl1), (2, data.H2R, data.H2Q, data.infl2)):
        if cochain_count(n, H_dst.module) > LIMIT:
            continue
        B = brute_force_cohomology(n, H_dst.module)
        Bd = [B.class_of(c) for c in H_dst.classes]
        for a, rep in enumerate(H_src.classes):
            v = inc[rep.values]
            vals = v[phibar] if n == 1 else v[phibar[:, None], phibar[None, :]]
            assert B.class_of(Cochain(n, H_dst.module, vals)) == Bd[m(a)]
    B = brute_force_cohomology(1, data.H1P.module)
    Bd = [B.class_of(c) for c in data.H1P.classes]
    for a, rep in enumerate(data.H1Q.classes):
        assert B.class_of(Cochain(1, data.H1P.module, rep.values[jbar])) == Bd[data.res1(a)]


@pytest.mark.parametrize("name", NAMES)
def test_degenerate_instances_are_zero(certs, name):
    if name in ("z3-inversion", "s3-klein"):
        assert all(g["order"] == 1 for g in certs[name]["groups"])


@pytest.mark.parametrize("name", NAMES)
def test_replay_accepts_fresh_certificate(certs, name):
    assert replay_report(certs[name]) == []
    assert replay_certificate(certs[name])


def test_replay_after_serialization(certs):
    for name in NAMES:
        text = dumps(certs[name])
        again = json.loads(text)
        assert again == json.loads(json.dumps(certs[name]))
        assert replay_certificate(again)


def test_replay_rejects_flipped_matrix(certs):
    bad = copy.deepcopy(certs["c2-klein"])
    bad["maps"][1]["matrix"][2] = 0
    assert not replay_certificate(bad)
    assert replay_report(bad)


def test_replay_rejects_wrong_class_rep(certs):
    bad = copy.deepcopy(certs["z8"])
    cls = bad["groups"][3]["classes"]
    cls[1] = cls[0]
    assert not replay_certificate(bad)


def test_replay_rejects_false_exactness(certs):
    bad = copy.deepcopy(certs["z8"])
    bad["exactness"][1]["holds"] = not bad["exactness"][1]["holds"]
    assert not replay_certificate(bad)


def test_malformed_certificates():
    with pytest.raises(MalformedCertificate):
        replay_report({"format": "nope"})
    with pytest.raises(MalformedCertificate):
        replay_report([1, 2, 3])
    cert = build_sequence(get_instance("z8"))
    del cert["groups"][2]
    with pytest.raises(MalformedCertificate):
        replay_report(cert)


def test_mutation_is_detected():
    failed = set()
    for name in NAMES:
        props = run_propositions(get_instance(name), mutations=MUTATIONS)
        failed |= {p["name"] for p in props if not p["passed"]}
    assert "aut-dictionary-KGQ" in failed
    cert = build_sequence(get_instance("z3-inversion"), mutations=MUTATIONS)
    assert not cert["verdict"]["ok"]
    with pytest.raises(ValidationError):
        run_propositions(get_instance("z8"), mutations=("no-such-bug",))


def test_threads_do_not_change_output():
    inst = get_instance("d4")
    assert dumps(build_sequence(inst, threads=1)) == dumps(build_sequence(inst, threads=4))


def test_unknown_instance():
    with pytest.raises(ValidationError):
        get_instance("nope")
