"""The six-term exact sequence of an iterated extension problem.

    0 -> H1(R, Z(K)^P) -infl-> H1(Q, Z(K)) -res-> H1(P, Z(K))^R -tgr->
         H2(R, Z(K)^P) -infl-> H2_P(Q, Z(K)) -rd-> H1(R, H1(P, Z(K)))

``build_sequence`` computes the six groups and five maps, checks exactness
at every interior node and writes everything into a JSON certificate whose
witnesses can be replayed with cochain arithmetic alone.
``run_propositions`` compares the cochain-level maps with their
group-theoretic counterparts built from twisted groups and automorphisms.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import catalog
from .cochain import (
    DEFAULT_SIZE_BOUND,
    Cochain,
    CoefficientModule,
    SequenceData,
    coboundary,
    is_cocycle,
)
from .errors import ActionMismatch, ExtlabError, MalformedCertificate, ValidationError
from .extensions import (
    Extension,
    OuterAction,
    _map,
    are_isomorphic_extensions,
    brute_force_aut_KGQ,
    delta_section,
    extension_automorphisms,
    extension_difference,
    make_extension,
    outer_action,
    p_subextension,
    restriction_of_difference,
    twist_extension,
)
from .groups import (
    Group,
    Subgroup,
    center,
    conjugation_perm,
    coset_quotient,
    direct_product,
    find_isomorphism,
    invert_perm,
    subgroup_generated,
)
from .iterext import (
    IteratedExtension,
    brute_force_aut_KNGQR,
    equivariance_check,
    iterext_automorphisms,
    iterext_difference,
    iterext_from_extension,
    iterext_isomorphic,
    make_iterext,
    mod_k_outer_action,
    problem_of,
    prolongation_classify,
    same_extension,
    section_iterext,
    theta_compatibility,
    transport_action,
    twist_inclusion,
    twist_iterext,
)

FORMAT = "extlab-certificate/1"
MUTATIONS = ("coboundary_inversion",)


@dataclass(frozen=True, eq=False)
class Instance:
    name: str
    K: Group
    pqr: Extension
    theta: OuterAction
    base: IteratedExtension | None = None


def make_instance(name: str, K: Group, pqr: Extension, theta: OuterAction,
                  base: IteratedExtension | None = None) -> Instance:
    if theta.Q != pqr.G or theta.K != K:
        raise ValidationError("theta must be an outer action of Q on K")
    if base is not None:
        if base.K != K or not same_extension(base.pqr, pqr):
            raise ValidationError("base iterated extension does not match K and pqr")
        if outer_action(base.q_main) != theta:
            raise ActionMismatch("outer action of the base differs from theta")
    return Instance(name, K, pqr, theta, base)


def instance_from_extension(name: str, ext: Extension, P_members: Iterable[int]) -> Instance:
    base = iterext_from_extension(ext, Subgroup(ext.Q, tuple(P_members)))
    return make_instance(name, ext.K, base.pqr, outer_action(base.q_main), base)


def _cyclic(orders, name):
    return Group(catalog.cyclic_product_table(orders), name=name)


def standard_instances() -> dict[str, Callable[[], Instance]]:
    """Builders of the desk-scale instances used by the acceptance suite."""
    C2, C3, C4, C8 = (catalog.get(n) for n in ("C2", "C3", "C4", "C8"))
    V = catalog.get("C2xC2")

    def z8():
        # K = {0,4} < N = {0,2,4,6} < C8, Q = C4, P = 2C4, R = C2
        ext = make_extension(C2, C8, C4, [0, 4], [g % 4 for g in range(8)])
        return instance_from_extension("z8", ext, (0, 2))

    def c2_klein():
        # C2 x C2 x C2 with K the first factor, P = {0, (0,1)} in Q = C2 x C2
        G = catalog.get("C2xC2xC2")
        ext = make_extension(C2, G, V, [0, 4], [g % 4 for g in range(8)])
        return instance_from_extension("c2-klein", ext, (0, 1))

    def z4_klein():
        G = _cyclic((4, 2, 2), "C4xC2xC2")
        ext = make_extension(C4, G, V, [0, 4, 8, 12], [g % 4 for g in range(16)])
        return instance_from_extension("z4-klein", ext, (0, 1))

    def z3_inversion():
        # S3 with its elements in lexicographic order: A3 = {0, 3, 4}
        S3 = catalog.get("S3")
        rot = next(g for g in range(6) if S3.element_order(g) == 3)
        i = [0, rot, S3.mul(rot, rot)]
        sign = [0 if g in i else 1 for g in range(6)]
        ext = make_extension(C3, S3, C2, i, sign)
        return instance_from_extension("z3-inversion", ext, (0,))

    def s3_klein():
        S3 = catalog.get("S3")
        G = direct_product(S3, V, name="S3xC2xC2")
        ext = make_extension(S3, G, V, [4 * s for s in range(6)], [g % 4 for g in range(24)])
        return instance_from_extension("s3-klein", ext, (0, 1))

    def z4_c16():
        G = _cyclic((16,), "C16")
        ext = make_extension(C4, G, C4, [0, 4, 8, 12], [g % 4 for g in range(16)])
        return instance_from_extension("z4-c16", ext, (0, 2))

    def d4():
        # K = Z(D4), N = rotations, Q = D4/Z(D4); reflections invert N
        D4 = catalog.get("D4")
        Z = center(D4)
        cq = coset_quotient(D4, Z)
        iso = find_isomorphism(cq.quotient, V)
        pi = [iso[cq.projection(g)] for g in range(8)]
        rot = [g for g in range(8) if D4.element_order(g) == 4]
        ext = make_extension(C2, D4, V, list(Z.members), pi)
        return instance_from_extension("d4", ext, sorted({0} | {pi[r] for r in rot}))

    def c2_d4():
        # C2 x D4 over D4, P a Klein four subgroup; R swaps two classes of H^1(P, C2)
        D4 = catalog.get("D4")
        G = direct_product(C2, D4, "C2xD4")
        ext = make_extension(C2, G, D4, [0, D4.order], [g % D4.order for g in range(G.order)])
        klein = next(S for S in (subgroup_generated(D4, [a, b]) for a in range(8) for b in range(8))
                     if S.order == 4 and all(D4.element_order(x) <= 2 for x in S.members))
        return instance_from_extension("c2-d4", ext, klein.members)

    return {"z8": z8, "c2-klein": c2_klein, "z4-klein": z4_klein, "z4-c16": z4_c16,
            "z3-inversion": z3_inversion, "s3-klein": s3_klein, "d4": d4, "c2-d4": c2_d4}


def get_instance(name: str) -> Instance:
    builders = standard_instances()
    if name not in builders:
        raise ValidationError(f"unknown instance {name!r}; known: {sorted(builders)}")
    return builders[name]()


# ---------------------------------------------------------------------------
# JSON helpers


def _module_json(M: CoefficientModule) -> dict:
    return {"actor": M.actor.table.tolist(), "coeffs": M.coeffs.table.tolist(), "action": M.action.tolist()}


def _module_from_json(d: dict) -> CoefficientModule:
    return CoefficientModule(Group(np.array(d["actor"])), Group(np.array(d["coeffs"])), np.array(d["action"]))


def _vals(c: Cochain):
    v = c.values
    return int(v) if np.ndim(v) == 0 else v.tolist()


def _sha(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()[:16]


def _flat(x) -> bool:
    return isinstance(x, list) and all(not isinstance(v, (list, dict)) or _flat(v) for v in x)


def _dump(obj, level: int) -> str:
    pad = "  " * (level + 1)
    if isinstance(obj, dict) and obj:
        items = [f"{pad}{json.dumps(k)}: {_dump(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    if isinstance(obj, list) and obj and not _flat(obj):
        items = [pad + _dump(v, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * level + "]"
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))


def dumps(obj) -> str:
    """Stable JSON: key order as built, scalar (and nested scalar) lists on one line."""
    return _dump(obj, 0) + "\n"


# ---------------------------------------------------------------------------
# the sequence


NODE_NAMES = (
    "H1(R,Z(K)^P)",
    "H1(Q,Z(K))",
    "H1(P,Z(K))^R",
    "H2(R,Z(K)^P)",
    "H2_P(Q,Z(K))",
    "H1(R,H1(P,Z(K)))",
)


def sequence_data(inst: Instance, size_bound: int = DEFAULT_SIZE_BOUND) -> SequenceData:
    return SequenceData(inst.theta.center_module, inst.pqr, size_bound)


def _node(name, H, subgroup=None, module_key=None) -> dict:
    members = list(subgroup) if subgroup is not None else list(range(H.order))
    return {
        "name": name,
        "order": len(members),
        "ambient_order": H.order,
        "ambient_invariant_factors": list(H.invariant_factors),
        "members": members,
        "module": module_key,
        "degree": H.degree,
        "classes": [_vals(c) for c in H.classes],
        "addition": H.table.table.tolist(),
    }


def _map_json(name, src, dst, cm, witnesses) -> dict:
    return {"name": name, "source": src, "target": dst, "domain": list(cm.domain),
            "matrix": list(cm.matrix), "witnesses": witnesses}


def _exactness(prev: dict | None, nxt: dict, node: int, members: list[int]) -> dict:
    """im(prev) = ker(nxt) inside ``members``; with prev None, injectivity of nxt."""
    g = dict(zip(nxt["domain"], nxt["matrix"]))
    if prev is None:
        kernel = [a for a in members if g[a] == 0]
        return {"node": node, "kind": "injective", "kernel": kernel, "holds": kernel == [0]}
    f_img = {}
    for a, b in zip(prev["domain"], prev["matrix"]):
        f_img.setdefault(b, a)
    kernel = [a for a in members if g[a] == 0]
    image = sorted(f_img)
    preimages = [[a, f_img[a]] for a in kernel if a in f_img]
    non_kernel = [[a, g[a]] for a in members if g[a] != 0]
    return {
        "node": node,
        "kind": "exact",
        "kernel": kernel,
        "image": image,
        "preimages": preimages,
        "non_kernel": non_kernel,
        "holds": kernel == image,
    }


def build_sequence(inst: Instance, propositions: bool = True, threads: int = 1,
                   mutations: Iterable[str] = (), size_bound: int = DEFAULT_SIZE_BOUND) -> dict:
    """The certificate for ``inst`` (see ``replay_certificate``)."""
    D = sequence_data(inst, size_bound)
    fixed = list(D.r_action.fixed.members)
    h2p = list(D.h2p.members)
    data = {
        "Q": D.Q.table.tolist(),
        "P": D.P.table.tolist(),
        "R": D.R.table.tolist(),
        "jbar": list(D.jbar.map),
        "phibar": list(D.phibar.map),
        "ubar": list(D.ubar),
        "fix_incl": list(D.fix_incl.map),
        "modules": {
            "M_Q": _module_json(D.M_Q),
            "M_P": _module_json(D.M_P),
            "M_R": _module_json(D.M_R),
            "H1P": _module_json(D.r_action.module),
        },
    }
    groups = [
        _node(NODE_NAMES[0], D.H1R, module_key="M_R"),
        _node(NODE_NAMES[1], D.H1Q, module_key="M_Q"),
        _node(NODE_NAMES[2], D.H1P, fixed, module_key="M_P"),
        _node(NODE_NAMES[3], D.H2R, module_key="M_R"),
        _node(NODE_NAMES[4], D.H2Q, h2p, module_key="M_Q"),
        _node(NODE_NAMES[5], D.H1R_H1P, module_key="H1P"),
    ]
    plain = lambda m: [{"bounding": _vals(b)} for _, b in m.witnesses]
    tgr_w = [{"z": [int(z) for z in w.z], "bounding": _vals(w.bounding)} for w in D.tgr.witnesses]
    rd_w = []
    for w in D.rd.witnesses:
        tb = [_vals(D.H1P.classify(gt)[1]) for gt in w.gamma_tilde]
        restricted_bound = [int(w.retraction.values[q]) for q in D.jbar.map]
        rd_w.append({"b": restricted_bound, "gamma": [int(x) for x in w.gamma.values],
                     "tilde_bounding": tb, "bounding": _vals(w.bounding)})
    maps = [
        _map_json("infl1", 0, 1, D.infl1, plain(D.infl1)),
        _map_json("res1", 1, 2, D.res1, plain(D.res1)),
        _map_json("tgr", 2, 3, D.tgr, tgr_w),
        _map_json("infl2", 3, 4, D.infl2, plain(D.infl2)),
        _map_json("rd", 4, 5, D.rd, rd_w),
    ]
    exactness = [_exactness(None, maps[0], 0, groups[0]["members"])]
    for k in range(1, 5):
        exactness.append(_exactness(maps[k - 1], maps[k], k, groups[k]["members"]))
    props = run_propositions(inst, threads=threads, mutations=mutations, data=D) if (
        propositions and inst.base is not None) else []
    cert = {
        "format": FORMAT,
        "instance": {"name": inst.name, "fingerprint": _sha(data), "has_base": inst.base is not None},
        "data": data,
        "groups": groups,
        "maps": maps,
        "exactness": exactness,
        "propositions": props,
    }
    cert["verdict"] = _verdict(cert)
    return cert


def _verdict(cert: dict) -> dict:
    exact = all(e["holds"] for e in cert["exactness"])
    props = all(p["passed"] for p in cert["propositions"])
    return {"exact": exact, "propositions": props, "ok": exact and props}


def orders(cert: dict) -> tuple:
    return tuple(g["order"] for g in cert["groups"])


# ---------------------------------------------------------------------------
# propositions


def _check(name, fn):
    try:
        ok, detail = fn()
    except ExtlabError as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return {"name": name, "passed": bool(ok), "detail": detail}


class _Context:
    """Shared group-theoretic objects of one instance."""

    def __init__(self, inst: Instance, D: SequenceData, mutations):
        self.inst = inst
        self.D = D
        self.ie = inst.base
        self.ext = inst.base.q_main
        self.theta = inst.theta
        self.invert = "coboundary_inversion" not in set(mutations)
        self.Theta = mod_k_outer_action(self.ie)
        self.P_sub = Subgroup(D.Q, tuple(D.jbar.map))

    def ext_dict(self):
        return extension_automorphisms(self.ext, self.theta)

    def iter_dict(self):
        return iterext_automorphisms(self.ie)

    def knp_dict(self):
        return extension_automorphisms(self.ie.knp, outer_action(self.ie.knp))

    def q_twist(self, e: Cochain) -> Extension:
        se = delta_section(self.ext, theta=self.theta)
        return twist_extension(e, se, self.theta).ext

    def r_twist(self, d: Cochain) -> IteratedExtension:
        return twist_iterext(d, section_iterext(self.ie, Theta=self.Theta)).ie


def _dictionary_checks(d, brute, invert: bool, degree0_module: CoefficientModule) -> tuple[bool, str]:
    bad = d.check()
    if bad:
        return False, bad[0]
    if sorted(d.automorphisms) != sorted(brute):
        return False, "automorphisms differ from the brute-force enumeration"
    for z0 in range(degree0_module.coeffs.order):
        lam = coboundary(Cochain(0, degree0_module, z0))
        if d.forward(lam) != d.coboundary_image(z0, invert=invert):
            return False, f"coboundary of {z0} does not map to conjugation by its inverse"
    return True, f"{len(d.automorphisms)} automorphisms, abelian"


def _p_ext_dictionary(c: _Context):
    d = c.ext_dict()
    return _dictionary_checks(d, brute_force_aut_KGQ(c.ext), c.invert, d.module)


def _p_iter_dictionary(c: _Context):
    d = c.iter_dict()
    ok, msg = _dictionary_checks(d, brute_force_aut_KNGQR(c.ie), c.invert, d.module)
    if not ok:
        return ok, msg
    # double filtration: the xi in Aut(KGQ) with xi o j = j
    filt = [x for x in brute_force_aut_KGQ(c.ext) if all(x[g] == g for g in c.ie.j.map)]
    if sorted(filt) != sorted(d.automorphisms):
        return False, "Aut(KNGQR) differs from the filtered Aut(KGQ)"
    return True, msg


def _p_inflation_automorphisms(c: _Context):
    D = c.D
    di, de = c.iter_dict(), c.ext_dict()
    cm = D.fix_incl.arr
    ph = D.phibar.arr
    for lam in di.cocycles:
        inflated = Cochain(1, D.M_Q, cm[lam.values[ph]])
        if di.forward(lam) != de.forward(inflated):
            return False, f"lambda {lam.values.tolist()}"
    for k, rep in enumerate(D.H1R.classes):
        a = di.class_map[k]
        xi = di.forward(rep)
        b = de.out.class_of_perm(xi)
        if de.class_map[D.infl1(k)] != b:
            return False, f"class {k} (Out index {a})"
    return True, f"{len(di.cocycles)} cocycles"


def _p_inner_center(c: _Context):
    G = c.ie.G
    di = c.iter_dict()
    zk = {conjugation_perm(G, c.ext.zk_to_G(z)) for z in range(c.ext.zk[0].order)}
    zkp = {di.coboundary_image(z, invert=False) for z in range(di.module.coeffs.order)}
    for xi in di.automorphisms:
        if (xi in zk) != (xi in zkp):
            return False, f"automorphism {xi}"
    return True, f"{len(di.automorphisms)} automorphisms compared"


def _p_restriction_automorphisms(c: _Context):
    D = c.D
    de, dk = c.ext_dict(), c.knp_dict()
    jn = c.ie.j.map
    pos = {g: n for n, g in enumerate(jn)}
    from .iterext import theta_compatible

    for lam, xi in zip(de.cocycles, de.automorphisms):
        eta = tuple(pos[xi[g]] for g in jn)
        if not theta_compatible(eta, c.Theta):
            return False, f"restriction of {xi} is not compatible"
        lhs = D.H1P.class_of(Cochain(1, D.M_P, dk.inverse(eta).values))
        rhs = D.res1(D.H1Q.class_of(lam))
        if lhs != rhs:
            return False, f"restriction square fails at {lam.values.tolist()}"
    return True, f"{len(de.automorphisms)} automorphisms"


def _p_transgression_twist(c: _Context):
    D = c.D
    dk = c.knp_dict()
    for cls in D.r_action.fixed.members:
        eta = dk.forward(D.H1P.classes[cls])
        tw = twist_inclusion(c.ie, eta, c.Theta)
        got = iterext_difference(tw, c.ie).cls
        if got != D.tgr(cls):
            return False, f"class {cls}: twist gives {got}, formula gives {D.tgr(cls)}"
    return True, f"{D.r_action.fixed.order} classes"


def _p_twist_exactness(c: _Context):
    tc = theta_compatibility(c.ie, c.Theta)
    autos = c.ext_dict().automorphisms
    j = c.ie.j.map
    for eta in tc.compatible:
        lhs = iterext_isomorphic(twist_inclusion(c.ie, eta, c.Theta), c.ie)
        rhs = any(all(x[j[n]] == j[eta[n]] for n in range(len(j))) for x in autos)
        if lhs != rhs:
            return False, f"eta {eta}: isomorphic={lhs}, extends={rhs}"
    return True, f"{len(tc.compatible)} compatible automorphisms"


def _p_restriction_of_difference(c: _Context):
    D = c.D
    for k, rep in enumerate(D.H2Q.classes):
        rd = restriction_of_difference(c.q_twist(rep), c.ext, c.P_sub)
        if not rd.agree:
            return False, f"class {k}: {rd.via_restriction} vs {rd.via_subextensions}"
        if rd.via_restriction != D.res2(k):
            return False, f"class {k} disagrees with the restriction map"
    return True, f"{D.H2Q.order} classes"


def _p_inflation_difference(c: _Context):
    D = c.D
    for k, rep in enumerate(D.H2R.classes):
        tw = c.r_twist(rep)
        got = extension_difference(tw.q_main, c.ext, c.theta).cls
        if got != D.infl2(k):
            return False, f"class {k}: {got} vs {D.infl2(k)}"
    return True, f"{D.H2R.order} classes"


def _p_qmain_exactness(c: _Context):
    D = c.D
    tc = theta_compatibility(c.ie, c.Theta)
    twists = [c.r_twist(rep) for rep in D.H2R.classes]
    for a, ia in enumerate(twists):
        for b, ib in enumerate(twists):
            lhs = extension_difference(ib.q_main, ia.q_main).cls == 0
            rhs = any(iterext_isomorphic(twist_inclusion(ia, eta, c.Theta), ib) for eta in tc.compatible)
            if lhs != rhs:
                return False, f"classes ({a}, {b}): Q-main isomorphic={lhs}, twisted={rhs}"
    return True, f"{len(twists) ** 2} pairs"


def _transported(c: _Context, e: Cochain):
    G2ext = c.q_twist(e)
    knp2, j2 = p_subextension(G2ext, c.P_sub)
    ie2 = make_iterext(knp2, c.ie.pqr, G2ext.G, j2.map, G2ext.pi.map)
    phi = are_isomorphic_extensions(knp2, c.ie.knp)
    if phi is None:
        raise ValidationError("P-subextensions are not isomorphic")
    Th2 = mod_k_outer_action(ie2)
    return ie2, phi, Th2, transport_action(phi, Th2, knp2, c.ie.knp)


def _p_reduction_transport(c: _Context):
    D = c.D
    pc = prolongation_classify(problem_of(c.ie))
    for e_cls in D.h2p.members:
        _, _, _, tr = _transported(c, D.H2Q.classes[e_cls])
        gamma = pc.inverse(tr.action.map)
        got = D.H1R_H1P.class_of(Cochain(1, D.r_action.module, gamma.values))
        if got != D.rd(e_cls):
            return False, f"class {e_cls}: transport gives {got}, formula gives {D.rd(e_cls)}"
    return True, f"{D.h2p.order} classes"


def _p_transport_exactness(c: _Context):
    D = c.D
    dk = c.knp_dict()
    for e_cls in D.h2p.members:
        ie2, phi, _, tr = _transported(c, D.H2Q.classes[e_cls])
        conj = c.Theta.map in tr.conjugacy_class
        phi_inv = invert_perm(phi.map)
        found = False
        for eta in dk.automorphisms:
            jstar = [ie2.j(phi_inv[x]) for x in invert_perm(eta)]
            cand = make_iterext(c.ie.knp, c.ie.pqr, ie2.G, jstar, ie2.pi.map)
            if mod_k_outer_action(cand) == c.Theta:
                found = True
                break
        in_kernel = D.rd(e_cls) == 0
        if not (conj == found == in_kernel):
            return False, f"class {e_cls}: conjugate={conj}, structure={found}, rd zero={in_kernel}"
    return True, f"{D.h2p.order} classes"


def _p_equivariance(c: _Context):
    v = equivariance_check(problem_of(c.ie))
    return v.ok, "equivariant" if v.ok else f"first violation {v.violation}"


def _p_compatible_classes(c: _Context):
    tc = theta_compatibility(c.ie, c.Theta)
    if sorted(tc.fixed) != list(c.D.r_action.fixed.members):
        return False, "fixed classes disagree"
    return tc.bijective, f"{len(tc.out_classes)} compatible outer classes"


def _p_prolongations(c: _Context):
    pc = prolongation_classify(problem_of(c.ie))
    if not pc.bijective:
        return False, "Gamma -> prolongation is not a bijection"
    for gamma, prol in zip(pc.cocycles, pc.prolongations):
        if pc.inverse(prol) != gamma:
            return False, "inverse map fails"
    # conjugate iff cohomologous
    for p1 in pc.prolongations:
        for p2 in pc.prolongations:
            same_orbit = any(p1 in o and p2 in o for o in pc.conjugacy_classes)
            if same_orbit != (pc.class_of_prolongation[p1] == pc.class_of_prolongation[p2]):
                return False, "conjugacy classes do not match cohomology classes"
    return True, f"{len(pc.prolongations)} prolongations, {len(pc.conjugacy_classes)} conjugacy classes"


PROPOSITIONS = (
    ("aut-dictionary-KGQ", _p_ext_dictionary),
    ("aut-dictionary-KNGQR", _p_iter_dictionary),
    ("inflation-vs-automorphism-inclusion", _p_inflation_automorphisms),
    ("inner-by-center-vs-fixed-center", _p_inner_center),
    ("restriction-vs-automorphism-restriction", _p_restriction_automorphisms),
    ("equivariance", _p_equivariance),
    ("compatible-classes", _p_compatible_classes),
    ("transgression-via-twisted-inclusion", _p_transgression_twist),
    ("twisted-inclusion-exactness", _p_twist_exactness),
    ("restriction-of-difference", _p_restriction_of_difference),
    ("inflation-of-iterated-difference", _p_inflation_difference),
    ("q-main-isomorphism-exactness", _p_qmain_exactness),
    ("prolongation-classification", _p_prolongations),
    ("reduction-via-transported-action", _p_reduction_transport),
    ("transported-action-exactness", _p_transport_exactness),
)


def run_propositions(inst: Instance, threads: int = 1, mutations: Iterable[str] = (),
                     data: SequenceData | None = None) -> list[dict]:
    """Checklist comparing cochain-level and group-theoretic constructions.

    ``mutations`` plants known bugs (see ``MUTATIONS``) to show the checks
    are sensitive.  Failures are recorded, never raised.
    """
    if inst.base is None:
        return []
    unknown = set(mutations) - set(MUTATIONS)
    if unknown:
        raise ValidationError(f"unknown mutations {sorted(unknown)}")
    ctx = _Context(inst, data or sequence_data(inst), mutations)
    # warm shared caches before fanning out
    ctx.D.rd, ctx.D.tgr
    return _map(lambda item: _check(item[0], lambda: item[1](ctx)), PROPOSITIONS, threads)


# ---------------------------------------------------------------------------
# replay


class _Replay:
    def __init__(self, cert: dict):
        try:
            d = cert["data"]
            self.Q = Group(np.array(d["Q"]))
            self.P = Group(np.array(d["P"]))
            self.R = Group(np.array(d["R"]))
            self.jbar = list(d["jbar"])
            self.phibar = list(d["phibar"])
            self.ubar = list(d["ubar"])
            self.fix_incl = list(d["fix_incl"])
            self.mods = {k: _module_from_json(v) for k, v in d["modules"].items()}
            self.groups = cert["groups"]
            self.maps = cert["maps"]
            self.exactness = cert["exactness"]
            if len(self.groups) != 6 or len(self.maps) != 5 or len(self.exactness) != 5:
                raise MalformedCertificate("expected six groups, five maps and five exactness records")
            self.reps = []
            for g in self.groups:
                M = self.mods[g["module"]]
                self.reps.append([Cochain(g["degree"], M, np.array(v)) for v in g["classes"]])
        except MalformedCertificate:
            raise
        except (KeyError, TypeError, ValueError, IndexError, ExtlabError) as exc:
            raise MalformedCertificate(f"{type(exc).__name__}: {exc}") from None
        self.failures: list[str] = []

    def fail(self, msg):
        self.failures.append(msg)

    def bounded(self, img: Cochain, node: int, idx: int, bounding, where: str):
        """img == reps[node][idx] * d(bounding)."""
        rep = self.reps[node][idx]
        b = Cochain(rep.degree - 1, rep.module, np.array(bounding))
        if img != rep * coboundary(b):
            self.fail(f"{where}: witness does not bound")

    def q_action_on_lam(self, lam: Cochain, q: int) -> Cochain:
        M = self.mods["M_Q"]
        Q = self.Q
        inv_j = {g: p for p, g in enumerate(self.jbar)}
        qi = Q.inverse(q)
        vals = [M.act(q, lam(inv_j[Q.product(qi, self.jbar[p], q)])) for p in range(self.P.order)]
        return Cochain(1, lam.module, vals)

    def run(self) -> list[str]:
        for node, reps in enumerate(self.reps):
            for k, rep in enumerate(reps):
                if not is_cocycle(rep):
                    self.fail(f"node {node}: representative {k} is not a cocycle")
        checks = (self.infl1, self.res1, self.tgr, self.infl2, self.rd)
        for m, check in zip(self.maps, checks):
            if len(m["domain"]) != len(m["matrix"]) or len(m["witnesses"]) != len(m["domain"]):
                self.fail(f"{m['name']}: sizes differ")
                continue
            for a, b, w in zip(m["domain"], m["matrix"], m["witnesses"]):
                try:
                    check(a, b, w)
                except (ExtlabError, IndexError, KeyError, ValueError, TypeError) as exc:
                    self.fail(f"{m['name']}[{a}]: {type(exc).__name__}: {exc}")
        self.exact()
        return self.failures

    def infl1(self, a, b, w):
        self._inflate(0, 1, 1, a, b, w)

    def infl2(self, a, b, w):
        self._inflate(3, 4, 2, a, b, w)

    def _inflate(self, src, dst, n, a, b, w):
        cm = np.array(self.fix_incl)
        ph = np.array(self.phibar)
        rep = self.reps[src][a]
        vals = cm[rep.values[ph]] if n == 1 else cm[rep.values[ph[:, None], ph[None, :]]]
        self.bounded(Cochain(n, self.mods["M_Q"], vals), dst, b, w["bounding"], f"infl{n}[{a}]")

    def res1(self, a, b, w):
        j = np.array(self.jbar)
        img = Cochain(1, self.mods["M_P"], self.reps[1][a].values[j])
        self.bounded(img, 2, b, w["bounding"], f"res1[{a}]")

    def tgr(self, a, b, w):
        lam = self.reps[2][a]
        M, A, Q, R = self.mods["M_Q"], self.mods["M_Q"].coeffs, self.Q, self.R
        MP = self.mods["M_P"]
        z = [int(x) for x in w["z"]]
        u = self.ubar
        for r in range(R.order):
            diff = self.q_action_on_lam(lam, u[r]) / lam
            if diff != coboundary(Cochain(0, MP, z[r])):
                self.fail(f"tgr[{a}]: z({r}) does not bound")
        inv_j = {g: p for p, g in enumerate(self.jbar)}
        fix_pos = {m: k for k, m in enumerate(self.fix_incl)}
        d = np.zeros((R.order, R.order), dtype=np.int64)
        for r1 in range(R.order):
            for r2 in range(R.order):
                r12 = R.mul(r1, r2)
                p = Q.product(Q.inverse(u[r12]), u[r1], u[r2])
                lam_term = M.act(u[r12], lam(inv_j[p]))
                val = A.product(z[r1], M.act(u[r1], z[r2]), A.inverse(z[r12]), A.inverse(lam_term))
                d[r1, r2] = fix_pos[val]
        self.bounded(Cochain(2, self.mods["M_R"], d), 3, b, w["bounding"], f"tgr[{a}]")

    def rd(self, a, b, w):
        e = self.reps[4][a]
        MQ, MP = self.mods["M_Q"], self.mods["M_P"]
        A, Q = MQ.coeffs, self.Q
        j = np.array(self.jbar)
        bP = Cochain(1, MP, np.array(w["b"]))
        if Cochain(2, MP, e.values[j[:, None], j[None, :]]) != coboundary(bP):
            self.fail(f"rd[{a}]: restriction to P is not bounded by b")
        bt = np.zeros(Q.order, dtype=np.int64)
        bt[j] = bP.values
        e2 = e / coboundary(Cochain(1, MQ, bt))
        gamma = [int(x) for x in w["gamma"]]
        for r in range(self.R.order):
            q = self.ubar[r]
            qi = Q.inverse(q)
            vals = [A.mul(e2(q, Q.product(qi, int(j[p]), q)), A.inverse(e2(int(j[p]), q)))
                    for p in range(self.P.order)]
            gt = Cochain(1, MP, vals)
            rep = self.reps[2][gamma[r]]
            if gt != rep * coboundary(Cochain(0, MP, np.array(w["tilde_bounding"][r]))):
                self.fail(f"rd[{a}]: Gamma~({r}) is not in class {gamma[r]}")
        self.bounded(Cochain(1, self.mods["H1P"], gamma), 5, b, w["bounding"], f"rd[{a}]")

    def exact(self):
        for k, ex in enumerate(self.exactness):
            members = self.groups[k]["members"]
            nxt = self.maps[k]
            g = dict(zip(nxt["domain"], nxt["matrix"]))
            if any(a not in g for a in members):
                self.fail(f"node {k}: map {nxt['name']} is not defined on every member")
                continue
            tgt_members = set(self.groups[k + 1]["members"])
            if any(v not in tgt_members for v in nxt["matrix"]):
                self.fail(f"map {nxt['name']} leaves node {k + 1}")
            kernel = [a for a in members if g[a] == 0]
            if kernel != ex["kernel"]:
                self.fail(f"node {k}: kernel record differs")
            if ex["kind"] == "injective":
                holds = kernel == [0]
            else:
                prev = self.maps[k - 1]
                f = dict(zip(prev["domain"], prev["matrix"]))
                image = sorted(set(prev["matrix"]))
                if image != ex["image"]:
                    self.fail(f"node {k}: image record differs")
                for x, pre in ex["preimages"]:
                    if f.get(pre) != x:
                        self.fail(f"node {k}: preimage witness of {x} fails")
                if sorted(x for x, _ in ex["preimages"]) != [x for x in kernel if x in set(image)]:
                    self.fail(f"node {k}: preimage witnesses incomplete")
                for x, v in ex["non_kernel"]:
                    if g.get(x) != v or v == 0:
                        self.fail(f"node {k}: non-kernel witness of {x} fails")
                holds = kernel == image
            if holds != ex["holds"]:
                self.fail(f"node {k}: recorded verdict differs")


def replay_report(cert: dict) -> list[str]:
    """Failures found while replaying ``cert`` (empty when it verifies)."""
    if not isinstance(cert, dict) or cert.get("format") != FORMAT:
        raise MalformedCertificate("not an extlab certificate")
    rp = _Replay(cert)
    fails = rp.run()
    try:
        if _sha(cert["data"]) != cert["instance"]["fingerprint"]:
            fails.append("instance fingerprint differs")
        if _verdict(cert) != cert["verdict"]:
            fails.append("recorded verdict differs")
        if not cert["verdict"]["ok"]:
            fails.append("certificate records a failed check")
    except (KeyError, TypeError) as exc:
        raise MalformedCertificate(f"{type(exc).__name__}: {exc}") from None
    return fails


def replay_certificate(cert: dict) -> bool:
    return not replay_report(cert)
