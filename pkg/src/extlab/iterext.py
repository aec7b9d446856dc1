"""Iterated extensions: K -> N -> G with N/K = P and G/N = R = Q/P.

An iterated extension is stored as the extension ``knp`` of K by P, the
extension ``pqr`` of P by Q with quotient R, the total group G and the maps
``j: N -> G`` and ``pi: G -> Q``.  The mod-K outer action Theta of Q on N
takes values in Out(N;K) = Aut_K(N)/C_N(K), where C_N(K) denotes the
conjugations by elements of K.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .cochain import (
    Cochain,
    CoefficientModule,
    CohomologyGroup,
    induced_theta0,
    is_cocycle,
    q_action_on_Z1,
    r_action_on_H1,
    restrict_module,
)
from .errors import (
    ActionMismatch,
    CoefficientMismatch,
    DiagramFailure,
    ExactnessFailure,
    NotACocycle,
    NotAProlongation,
    NotExtensionIso,
    NoSection,
    NotThetaCompatible,
    ValidationError,
)
from .extensions import (
    AutDictionary,
    ClassRecord,
    Difference,
    Extension,
    OuterAction,
    _map,
    cohomology_cached,
    extension_automorphisms,
    make_extension,
    outer_action,
    table_hash,
)
from .groups import (
    DEFAULT_SEARCH_BOUND,
    AutomorphismGroup,
    CosetQuotient,
    Group,
    Homomorphism,
    PartialMap,
    Subgroup,
    automorphism_group,
    compose_perms,
    conjugation_perm,
    coset_quotient,
    fingerprint,
    homomorphisms,
    invert_perm,
    make_homomorphism,
    relative_automorphisms,
    validate_group,
)


def same_extension(a: Extension, b: Extension) -> bool:
    return a.K == b.K and a.G == b.G and a.Q == b.Q and a.i.map == b.i.map and a.pi.map == b.pi.map


@dataclass(frozen=True, eq=False)
class IteratedExtension:
    knp: Extension
    pqr: Extension
    G: Group
    j: Homomorphism
    pi: Homomorphism

    def __repr__(self):
        return (f"<IteratedExtension |K|={self.K.order} |N|={self.N.order} |G|={self.G.order} "
                f"|Q|={self.Q.order} |R|={self.R.order}>")

    @property
    def K(self) -> Group:
        return self.knp.K

    @property
    def N(self) -> Group:
        return self.knp.G

    @property
    def P(self) -> Group:
        return self.knp.Q

    @property
    def Q(self) -> Group:
        return self.pqr.G

    @property
    def R(self) -> Group:
        return self.pqr.Q

    @cached_property
    def i(self) -> Homomorphism:
        return self.j.compose(self.knp.i)

    @cached_property
    def phi(self) -> Homomorphism:
        return self.pqr.pi.compose(self.pi)

    @cached_property
    def N_sub(self) -> Subgroup:
        return Subgroup(self.G, self.j.map)

    @cached_property
    def _jinv(self) -> dict:
        return {g: n for n, g in enumerate(self.j.map)}

    def j_inverse(self, g: int) -> int:
        try:
            return self._jinv[int(g)]
        except KeyError:
            raise ExactnessFailure(f"element {g} is not in j(N)") from None

    def conj_on_N(self, g: int) -> tuple:
        """n -> j^-1(g j(n) g^-1)."""
        G = self.G
        gi = G.inverse(g)
        return tuple(self.j_inverse(G.product(g, self.j(n), gi)) for n in range(self.N.order))

    def q_main_extension(self) -> Extension:
        return make_extension(self.K, self.G, self.Q, self.i.map, self.pi.map)

    @cached_property
    def q_main(self) -> Extension:
        return self.q_main_extension()

    @cached_property
    def phi_section(self) -> tuple:
        """Least-index preimage under phi of each element of R."""
        out = [None] * self.R.order
        for g, r in enumerate(self.phi.map):
            if out[r] is None:
                out[r] = g
        return tuple(out)


def make_iterext(knp: Extension, pqr: Extension, G: Group, j, pi) -> IteratedExtension:
    if knp.Q != pqr.K:
        raise DiagramFailure("P of knp differs from P of pqr")
    try:
        j = make_homomorphism(knp.G, G, j.map if isinstance(j, Homomorphism) else j)
        pi = make_homomorphism(G, pqr.G, pi.map if isinstance(pi, Homomorphism) else pi)
    except ValidationError as exc:
        raise DiagramFailure(f"component map invalid: {exc}") from None
    for n in range(knp.G.order):
        if pi(j(n)) != pqr.i(knp.pi(n)):
            raise DiagramFailure(f"pi o j != jbar o pi0 at {n}")
    if not j.is_injective:
        raise ExactnessFailure("N: j is not injective")
    if not pi.is_surjective:
        raise ExactnessFailure("Q: pi is not surjective")
    phi = pqr.pi.compose(pi)
    if set(j.map) != set(phi.kernel().members):
        raise ExactnessFailure("N: j(N) differs from the kernel of phi")
    i = j.compose(knp.i)
    if set(i.map) != set(pi.kernel().members):
        raise ExactnessFailure("K: i(K) differs from the kernel of pi")
    return IteratedExtension(knp, pqr, G, j, pi)


def iterext_from_extension(ext: Extension, P: Subgroup) -> IteratedExtension:
    """Cut an extension along a normal subgroup P of its quotient."""
    from .extensions import p_subextension, pqr_extension

    knp, j = p_subextension(ext, P)
    pqr = pqr_extension(ext.Q, P)
    if knp.Q != pqr.K:  # pragma: no cover - both built from P.as_group
        raise DiagramFailure("inconsistent P labels")
    return make_iterext(knp, pqr, ext.G, j.map, ext.pi.map)


# ---------------------------------------------------------------------------
# mod-K outer actions


_REL_CACHE: dict = {}


def out_NK(N: Group, K_sub: Subgroup, bound: int = DEFAULT_SEARCH_BOUND):
    """Cached (Aut_K(N), C_N(K), Out(N;K))."""
    key = (N.table.tobytes(), K_sub.members)
    hit = _REL_CACHE.get(key)
    if hit is None or hit[0].base != N:
        hit = relative_automorphisms(N, K_sub, bound)
        _REL_CACHE[key] = hit
    return hit


@dataclass(frozen=True, eq=False)
class ModKOuterAction:
    actor: Group
    N: Group
    K_sub: Subgroup
    out: CosetQuotient
    map: tuple

    def __eq__(self, other):
        return (
            isinstance(other, ModKOuterAction)
            and self.actor == other.actor
            and self.N == other.N
            and self.K_sub == other.K_sub
            and self.map == other.map
        )

    def __hash__(self):
        return hash(self.map)

    def rep_perm(self, x: int) -> tuple:
        return self.out.rep_perm(self.map[x])

    def as_homomorphism(self) -> Homomorphism:
        return make_homomorphism(self.actor, self.out.quotient, self.map)


def _k_sub(knp: Extension) -> Subgroup:
    return Subgroup(knp.G, knp.i.map)


def theta_P(knp: Extension) -> ModKOuterAction:
    K_sub = _k_sub(knp)
    _, _, out = out_NK(knp.G, K_sub)
    vals = [None] * knp.Q.order
    for n in range(knp.G.order):
        p = knp.pi(n)
        c = out.class_of_perm(conjugation_perm(knp.G, n))
        if vals[p] is None:
            vals[p] = c
        elif vals[p] != c:  # pragma: no cover
            raise ExactnessFailure("Theta_P is not well defined")
    make_homomorphism(knp.Q, out.quotient, vals)
    return ModKOuterAction(knp.Q, knp.G, K_sub, out, tuple(vals))


def mod_k_outer_action(ie: IteratedExtension, check: bool = True) -> ModKOuterAction:
    K_sub = _k_sub(ie.knp)
    _, _, out = out_NK(ie.N, K_sub)
    vals = [None] * ie.Q.order
    for g in range(ie.G.order):
        q = ie.pi(g)
        c = out.class_of_perm(ie.conj_on_N(g))
        if vals[q] is None:
            vals[q] = c
        elif vals[q] != c:  # pragma: no cover
            raise ExactnessFailure("Theta is not well defined")
    make_homomorphism(ie.Q, out.quotient, vals)
    Theta = ModKOuterAction(ie.Q, ie.N, K_sub, out, tuple(vals))
    if check:
        prob = IterextProblem(ie.knp, ie.pqr, Theta, outer_action(ie.q_main))
        bad = prolongation_failures(prob)
        if bad:  # pragma: no cover - a theorem for genuine iterated extensions
            raise NotAProlongation(bad[0])
    return Theta


@dataclass(frozen=True, eq=False)
class IterextProblem:
    knp: Extension
    pqr: Extension
    Theta: ModKOuterAction
    theta: OuterAction


def problem_of(ie: IteratedExtension) -> IterextProblem:
    return IterextProblem(ie.knp, ie.pqr, mod_k_outer_action(ie, check=False), outer_action(ie.q_main))


def nk_perm(knp: Extension, eta) -> tuple:
    """Restriction of eta in Aut_K(N) to K, in K's own labels."""
    return tuple(knp.i_inverse(eta[knp.i(k)]) for k in range(knp.K.order))


def np_perm(knp: Extension, eta) -> tuple:
    """Automorphism of P induced by eta in Aut_K(N)."""
    out = [None] * knp.Q.order
    for n in range(knp.G.order):
        p = knp.pi(n)
        v = knp.pi(eta[n])
        if out[p] is None:
            out[p] = v
        elif out[p] != v:
            raise ValidationError("automorphism does not descend to P")
    return tuple(out)


def conj_P_in_Q(pqr: Extension, q: int) -> tuple:
    Q = pqr.G
    qi = Q.inverse(q)
    return tuple(pqr.i_inverse(Q.product(q, pqr.i(p), qi)) for p in range(pqr.K.order))


def is_prolongation(Theta: ModKOuterAction, Theta_P: ModKOuterAction, jbar: Homomorphism) -> bool:
    return all(Theta.map[jbar(p)] == Theta_P.map[p] for p in range(jbar.source.order))


def prolongation_failures(prob: IterextProblem) -> list[str]:
    """All violated conditions of a (theta, C_P^Q)-prolongation (empty if none)."""
    knp, pqr, Th, th = prob.knp, prob.pqr, prob.Theta, prob.theta
    bad = []
    try:
        Th.as_homomorphism()
    except ValidationError:
        bad.append("Theta is not a homomorphism")
    th_knp = outer_action(knp)
    for p in range(knp.Q.order):
        if th_knp.map[p] != th.map[pqr.i(p)]:
            bad.append(f"outer action of knp differs from theta at p={p}")
            break
    if not is_prolongation(Th, theta_P(knp), pqr.i):
        bad.append("Theta does not prolong Theta_P")
    for q in range(pqr.G.order):
        eta = Th.rep_perm(q)
        if th.out.class_of_perm(nk_perm(knp, eta)) != th.map[q]:
            bad.append(f"Theta does not induce theta at q={q}")
            break
    for q in range(pqr.G.order):
        if np_perm(knp, Th.rep_perm(q)) != conj_P_in_Q(pqr, q):
            bad.append(f"Theta does not induce conjugation on P at q={q}")
            break
    return bad


def is_compatible_prolongation(prob: IterextProblem) -> bool:
    return not prolongation_failures(prob)


# ---------------------------------------------------------------------------
# automorphisms


def theta0_module(ie: IteratedExtension, theta: OuterAction | None = None):
    th = theta or outer_action(ie.q_main)
    return induced_theta0(th.center_module, ie.pqr)


def iterext_automorphisms(ie: IteratedExtension) -> AutDictionary:
    """Z^1(R, Z(K)^P) -> Aut(KNGQR), lam -> (g -> lam(phi g) g)."""
    th = outer_action(ie.q_main)
    M_R, incl = induced_theta0(th.center_module, ie.pqr)
    H1 = cohomology_cached(1, M_R)
    ext = ie.q_main
    G = ie.G
    phi = ie.phi.arr
    to_G = np.array([ext.zk_to_G(incl(z)) for z in range(M_R.coeffs.order)], dtype=np.int64)
    pos = {int(g): z for z, g in enumerate(to_G)}
    u = ie.phi_section

    def forward(lam: Cochain) -> tuple:
        return tuple(int(x) for x in G.table[to_G[lam.values[phi]], np.arange(G.order)])

    def inverse(xi) -> Cochain:
        vals = []
        for r in range(ie.R.order):
            g = G.mul(xi[u[r]], G.inverse(u[r]))
            if g not in pos:
                raise ValidationError("automorphism does not come from Z(K)^P")
            vals.append(pos[g])
        return Cochain(1, M_R, vals)

    def coboundary_image(z0: int, invert: bool = True) -> tuple:
        z = M_R.coeffs.inverse(z0) if invert else z0
        return conjugation_perm(G, int(to_G[z]))

    cocycles = H1.cocycles()
    autos = [forward(lam) for lam in cocycles]
    grp = AutomorphismGroup(G, autos, name="Aut(KNGQR)")
    inner = grp.subgroup({coboundary_image(z) for z in range(M_R.coeffs.order)})
    out = coset_quotient(grp.table, inner, automorphisms=grp)
    cmap = tuple(out.class_of_perm(forward(rep)) for rep in H1.classes)
    return AutDictionary(M_R, H1, cocycles, autos, grp, forward, inverse, coboundary_image, inner, out, cmap)


def brute_force_aut_KNGQR(ie: IteratedExtension) -> list[tuple]:
    aut = automorphism_group(ie.G, max(DEFAULT_SEARCH_BOUND, ie.G.order))
    return [
        p for p in aut.elements
        if all(p[g] == g for g in ie.j.map) and all(ie.pi(p[g]) == ie.pi(g) for g in range(ie.G.order))
    ]


def theta_compatible(eta, Theta: ModKOuterAction) -> bool:
    """True iff the Out(N;K)-class of eta commutes with every Theta(q)."""
    c = Theta.out.class_of_perm(eta)
    T = Theta.out.quotient
    return all(T.mul(c, t) == T.mul(t, c) for t in Theta.map)


def in_aut_KNP(knp: Extension, eta) -> bool:
    return all(eta[knp.i(k)] == knp.i(k) for k in range(knp.K.order)) and all(
        knp.pi(eta[n]) == knp.pi(n) for n in range(knp.G.order)
    )


@dataclass
class ThetaCompatibility:
    knp_dictionary: AutDictionary  # Z^1(P, Z(K)) -> Aut(KNP)
    compatible: list  # Aut_Theta(KNP) as permutations of N
    out_classes: list  # Out_Theta(KNP;K) as Out(N;K) indices
    class_to_out: dict  # H^1(P,Z(K))^R class -> Out(N;K) index
    fixed: list  # H^1(P, Z(K))^R

    @property
    def bijective(self) -> bool:
        vals = list(self.class_to_out.values())
        return len(set(vals)) == len(vals) and set(vals) == set(self.out_classes)


def theta_compatibility(ie: IteratedExtension, Theta: ModKOuterAction | None = None) -> ThetaCompatibility:
    Theta = Theta or mod_k_outer_action(ie)
    th = outer_action(ie.q_main)
    d = extension_automorphisms(ie.knp, outer_action(ie.knp))
    comp = [eta for eta in d.automorphisms if theta_compatible(eta, Theta)]
    outs = sorted({Theta.out.class_of_perm(eta) for eta in comp})
    ra = r_action_on_H1(th.center_module, ie.pqr, d.H1)
    fixed = list(ra.fixed.members)
    c2o = {c: Theta.out.class_of_perm(d.forward(d.H1.classes[c])) for c in fixed}
    return ThetaCompatibility(d, comp, outs, c2o, fixed)


@dataclass
class Verdict:
    ok: bool
    violation: object = None


def equivariance_check(prob: IterextProblem, action=None) -> Verdict:
    """lam* intertwines the Q-action on Z^1(P, Z(K)) with Sigma(q)-conjugation.

    ``action`` overrides q -> (^q lam) to plant defects in tests.
    """
    th = prob.theta
    M_Q = th.center_module
    d = extension_automorphisms(prob.knp, outer_action(prob.knp))
    act = action or (lambda lam, q: q_action_on_Z1(M_Q, prob.pqr, lam, q))
    for q in range(prob.pqr.G.order):
        sig = prob.Theta.rep_perm(q)
        sig_inv = invert_perm(sig)
        for lam, star in zip(d.cocycles, d.automorphisms):
            lhs = d.forward(act(lam, q))
            rhs = compose_perms(compose_perms(sig, star), sig_inv)
            if lhs != rhs:
                return Verdict(False, (q, lam.values.tolist()))
    # induced R-equivariance on classes
    out = prob.Theta.out
    T = out.quotient
    ra = r_action_on_H1(M_Q, prob.pqr, d.H1)
    for q in range(prob.pqr.G.order):
        r = prob.pqr.pi(q)
        t = prob.Theta.map[q]
        for c, rep in enumerate(d.H1.classes):
            lhs = out.class_of_perm(d.forward(d.H1.classes[ra.module.act(r, c)]))
            rhs = T.product(t, out.class_of_perm(d.forward(rep)), T.inverse(t))
            if lhs != rhs:
                return Verdict(False, (q, c))
    return Verdict(True)


# ---------------------------------------------------------------------------
# sections, factor sets and twisting


@dataclass(frozen=True, eq=False)
class SectionedIterext:
    ie: IteratedExtension
    ubar: tuple  # R -> Q
    Delta: tuple  # R -> Aut_K(N) permutations
    u: PartialMap  # R -> G


def canonical_Delta(Theta: ModKOuterAction, ubar: Sequence[int]) -> tuple:
    return tuple(Theta.rep_perm(q) for q in ubar)


def section_iterext(ie: IteratedExtension, ubar: Sequence[int] | None = None,
                    Delta: Sequence[Sequence[int]] | None = None,
                    Theta: ModKOuterAction | None = None) -> SectionedIterext:
    """u with pi o u = ubar and C_N(u(r)) = Delta(r), least index first."""
    Theta = Theta or mod_k_outer_action(ie)
    ubar = tuple(ubar) if ubar is not None else ie.pqr.section
    if any(ie.pqr.pi(ubar[r]) != r for r in range(ie.R.order)) or ubar[0] != 0:
        raise NoSection("ubar is not a normalized section of phibar")
    Delta = tuple(tuple(int(x) for x in d) for d in (Delta or canonical_Delta(Theta, ubar)))
    u = []
    for r in range(ie.R.order):
        if Delta[r] not in Theta.out.automorphisms or Theta.out.class_of_perm(Delta[r]) != Theta.map[ubar[r]]:
            raise NoSection(f"Delta({r}) does not lift Theta(ubar({r}))")
        # stage 1: the fibre pi^-1(ubar r) is i(K) g0; stage 2: pick the K-translate
        pick = next((g for g in ie.pi.preimages(ubar[r]) if ie.conj_on_N(g) == Delta[r]), None)
        if pick is None:  # pragma: no cover - C_N(K) acts transitively on the coset
            raise NoSection(f"no lift of {r} induces Delta({r})")
        u.append(pick)
    if u[0] != 0:
        raise NoSection("u(1) must be 1")
    return SectionedIterext(ie, ubar, Delta, PartialMap(ie.R, ie.G, u))


def iter_factor_set(sie: SectionedIterext) -> np.ndarray:
    """f(r1, r2) = j^-1(u(r1) u(r2) u(r1 r2)^-1), elements of N."""
    ie, u = sie.ie, sie.u.map
    G, R = ie.G, ie.R
    f = np.zeros((R.order, R.order), dtype=np.int64)
    for a in range(R.order):
        for b in range(R.order):
            f[a, b] = ie.j_inverse(G.product(u[a], u[b], G.inverse(u[R.mul(a, b)])))
    return f


def _zkp_to_G(ie: IteratedExtension, incl: Homomorphism) -> np.ndarray:
    ext = ie.q_main
    return np.array([ext.zk_to_G(incl(z)) for z in range(incl.source.order)], dtype=np.int64)


def twist_iterext(d: Cochain, sie: SectionedIterext) -> SectionedIterext:
    """Twist of G by d, with m_d(g1, g2) = i(d(phi g1, phi g2)) g1 g2."""
    ie = sie.ie
    M_R, incl = theta0_module(ie)
    if d.degree != 2 or d.module.coeffs != M_R.coeffs or not np.array_equal(d.module.action, M_R.action):
        raise CoefficientMismatch("d must be a 2-cochain with values in the R-module Z(K)^P")
    if not is_cocycle(d):
        raise NotACocycle("d is not a 2-cocycle")
    G = ie.G
    to_G = _zkp_to_G(ie, incl)
    phi = ie.phi.arr
    t = G.table[to_G[d.values[phi[:, None], phi[None, :]]], G.table]
    G2 = validate_group(t, name=f"twist({G.name})" if G.name else None)
    # inversion formula v_d(g) = theta0(phi g)^-1 [d(phi g, (phi g)^-1)^-1] g^-1
    A = M_R.coeffs
    for g in range(G.order):
        x = int(phi[g])
        xi = ie.R.inverse(x)
        z = M_R.act(xi, A.inverse(d(x, xi)))
        if G.mul(int(to_G[z]), G.inverse(g)) != G2.inverse(g):
            raise ValidationError("inversion formula of the twisted group fails")
    new = make_iterext(ie.knp, ie.pqr, G2, ie.j.map, ie.pi.map)
    for g in range(G.order):
        if new.conj_on_N(g) != ie.conj_on_N(g):
            raise ValidationError("twisting changed the conjugation action on N")
    u = PartialMap(ie.R, G2, sie.u.map)
    return SectionedIterext(new, sie.ubar, sie.Delta, u)


def _same_frame(a: IteratedExtension, b: IteratedExtension):
    if not (same_extension(a.knp, b.knp) and same_extension(a.pqr, b.pqr)):
        raise ActionMismatch("iterated extensions must share knp and pqr")


def iterext_difference(ie2: IteratedExtension, ie: IteratedExtension) -> Difference:
    """Class [d] in H^2(R, Z(K)^P) such that ie2 is ie twisted by d."""
    _same_frame(ie2, ie)
    Th = mod_k_outer_action(ie, check=False)
    Th2 = mod_k_outer_action(ie2, check=False)
    if Th != Th2:
        raise ActionMismatch("mod-K outer actions differ")
    s = section_iterext(ie, Theta=Th)
    s2 = section_iterext(ie2, Theta=Th2)
    f = iter_factor_set(s)
    f2 = iter_factor_set(s2)
    M_R, incl = theta0_module(ie)
    N = ie.N
    knp = ie.knp
    pos = {}
    for z in range(incl.source.order):
        pos[knp.i(ie.q_main.zk[1](incl(z)))] = z
    R = ie.R
    vals = np.zeros((R.order, R.order), dtype=np.int64)
    for a in range(R.order):
        for b in range(R.order):
            n = N.mul(int(f2[a, b]), N.inverse(int(f[a, b])))
            if n not in pos:
                raise ValidationError("factor sets differ outside Z(K)^P")
            vals[a, b] = pos[n]
    d = Cochain(2, M_R, vals)
    H2 = cohomology_cached(2, M_R)
    cls, b = H2.classify(d)
    return Difference(cls, d, H2, b)


def iterext_isomorphic(ie1: IteratedExtension, ie2: IteratedExtension) -> bool:
    """Isomorphic as iterated extensions over the same knp and pqr."""
    _same_frame(ie1, ie2)
    if mod_k_outer_action(ie1, check=False) != mod_k_outer_action(ie2, check=False):
        return False
    return iterext_difference(ie2, ie1).cls == 0


def classify_iterexts(base: IteratedExtension, threads: int = 1) -> list[ClassRecord]:
    from .catalog import identify

    Theta = mod_k_outer_action(base)
    sie = section_iterext(base, Theta=Theta)
    M_R, _ = theta0_module(base)
    H2 = cohomology_cached(2, M_R)

    def build(k):
        rep = H2.classes[k]
        tw = twist_iterext(rep, sie)
        if mod_k_outer_action(tw.ie) != Theta:  # pragma: no cover
            raise ActionMismatch("twist changed Theta")
        back = iterext_difference(tw.ie, base).cls
        if back != k:
            raise ExactnessFailure(f"round trip of class {k} gave {back}")
        G = tw.ie.G
        return ClassRecord(k, rep, tw, fingerprint(G), table_hash(G), identify(G))

    return _map(build, range(H2.order), threads)


# ---------------------------------------------------------------------------
# twisted inclusions


def retarget_inclusion(ie: IteratedExtension, eta) -> IteratedExtension:
    """(G, j o eta, pi) for any eta in Aut(KNP); the action may change."""
    if not in_aut_KNP(ie.knp, eta):
        raise ValidationError("eta must fix K pointwise and induce the identity on P")
    return make_iterext(ie.knp, ie.pqr, ie.G, [ie.j(eta[n]) for n in range(ie.N.order)], ie.pi.map)


def twist_inclusion(ie: IteratedExtension, eta, Theta: ModKOuterAction | None = None) -> IteratedExtension:
    Theta = Theta or mod_k_outer_action(ie)
    if not in_aut_KNP(ie.knp, eta):
        raise NotThetaCompatible("eta is not in Aut(KNP)")
    if not theta_compatible(eta, Theta):
        raise NotThetaCompatible("eta does not commute with Theta")
    new = retarget_inclusion(ie, eta)
    if mod_k_outer_action(new) != Theta:  # pragma: no cover - equivalent to compatibility
        raise NotThetaCompatible("twisted inclusion changed Theta")
    eta_inv = invert_perm(eta)
    for g in range(ie.G.order):
        expect = compose_perms(compose_perms(eta_inv, ie.conj_on_N(g)), eta)
        if new.conj_on_N(g) != expect:
            raise ValidationError("conjugation identity for the twisted inclusion fails")
    return new


# ---------------------------------------------------------------------------
# prolongations


@dataclass
class ProlongationClassification:
    Theta: ModKOuterAction
    h1_to_out: tuple  # H^1(P,Z(K)) class -> Out(N;K) index
    cocycles: list  # Z^1(R, H^1(P, Z(K)))
    prolongations: list  # maps Q -> Out(N;K), aligned with cocycles
    all_prolongations: list  # brute-force enumeration
    H1: CohomologyGroup  # H^1(R, H^1(P, Z(K)))
    class_of_prolongation: dict  # map -> H^1 class index
    conjugacy_classes: list  # list of sets of maps

    def diamond(self, gamma: Cochain) -> tuple:
        T = self.Theta.out.quotient
        phibar = self._phibar
        return tuple(T.mul(self.h1_to_out[gamma(phibar(q))], self.Theta.map[q]) for q in range(len(self.Theta.map)))

    def inverse(self, prol: Sequence[int]) -> Cochain:
        T = self.Theta.out.quotient
        back = {o: c for c, o in enumerate(self.h1_to_out)}
        vals = []
        for q in self._ubar:
            o = T.mul(prol[q], T.inverse(self.Theta.map[q]))
            if o not in back:
                raise NotAProlongation("difference does not lie in Out(KNP;K)")
            vals.append(back[o])
        return Cochain(1, self.H1.module, vals)

    @property
    def bijective(self) -> bool:
        return sorted(set(self.prolongations)) == sorted(self.all_prolongations) and len(
            set(self.prolongations)) == len(self.prolongations)

    _phibar: Homomorphism = None
    _ubar: tuple = ()


def conjugate_action(Theta_map: Sequence[int], c: int, T: Group) -> tuple:
    """q -> c^-1 Theta(q) c."""
    ci = T.inverse(c)
    return tuple(T.product(ci, t, c) for t in Theta_map)


def prolongation_classify(prob: IterextProblem) -> ProlongationClassification:
    Theta = prob.Theta
    if not is_compatible_prolongation(prob):
        raise NotAProlongation("base action is not a (theta, C_P^Q)-prolongation")
    knp, pqr = prob.knp, prob.pqr
    M_Q = prob.theta.center_module
    d = extension_automorphisms(knp, outer_action(knp))
    ra = r_action_on_H1(M_Q, pqr, d.H1)
    out = Theta.out
    T = out.quotient
    h1_to_out = tuple(out.class_of_perm(d.forward(rep)) for rep in d.H1.classes)
    if len(set(h1_to_out)) != len(h1_to_out):
        raise NotAProlongation("H^1(P, Z(K)) does not embed in Out(N;K)")
    H1 = cohomology_cached(1, ra.module)
    cocycles = H1.cocycles()
    phibar = pqr.pi
    prols = []
    for gamma in cocycles:
        prols.append(tuple(T.mul(h1_to_out[gamma(phibar(q))], Theta.map[q]) for q in range(pqr.G.order)))
    for p in prols:
        if not is_compatible_prolongation(IterextProblem(knp, pqr, ModKOuterAction(Theta.actor, Theta.N, Theta.K_sub, out, p), prob.theta)):
            raise NotAProlongation("the prolongation built from Gamma is invalid")
    brute = []
    for h in homomorphisms(pqr.G, T):
        cand = ModKOuterAction(Theta.actor, Theta.N, Theta.K_sub, out, h)
        if is_compatible_prolongation(IterextProblem(knp, pqr, cand, prob.theta)):
            brute.append(h)
    cls_of = {p: H1.class_of(g) for p, g in zip(prols, cocycles)}
    kn = sorted(set(h1_to_out))
    classes, seen = [], set()
    for p in sorted(set(prols)):
        if p in seen:
            continue
        orbit = {conjugate_action(p, c, T) for c in kn}
        seen |= orbit
        classes.append(orbit)
    pc = ProlongationClassification(Theta, h1_to_out, cocycles, prols, sorted(brute), H1, cls_of, classes)
    pc._phibar = phibar
    pc._ubar = pqr.section
    return pc


@dataclass
class TransportResult:
    action: ModKOuterAction
    conjugacy_class: list  # sorted maps conjugate under Out(KNP;K)

    @property
    def canonical(self) -> tuple:
        return self.conjugacy_class[0]


def transport_action(phi: Homomorphism, Theta2: ModKOuterAction, knp2: Extension, knp: Extension) -> TransportResult:
    """q -> phi o Theta2(q) o phi^-1, for an isomorphism phi: N2 -> N of extensions."""
    if phi.source != knp2.G or phi.target != knp.G or not phi.is_injective:
        raise NotExtensionIso("phi must be an isomorphism N2 -> N")
    if any(phi(knp2.i(k)) != knp.i(k) for k in range(knp.K.order)):
        raise NotExtensionIso("phi does not fix K")
    if any(knp.pi(phi(n)) != knp2.pi(n) for n in range(knp2.G.order)):
        raise NotExtensionIso("phi does not respect the projection to P")
    K_sub = _k_sub(knp)
    _, _, out = out_NK(knp.G, K_sub)
    phi_inv = invert_perm(phi.map)
    vals = []
    for q in range(Theta2.actor.order):
        sig = compose_perms(compose_perms(phi.map, Theta2.rep_perm(q)), phi_inv)
        vals.append(out.class_of_perm(sig))
    act = ModKOuterAction(Theta2.actor, knp.G, K_sub, out, tuple(vals))
    d = extension_automorphisms(knp, outer_action(knp))
    kn = sorted({out.class_of_perm(x) for x in d.automorphisms})
    T = out.quotient
    orbit = sorted({conjugate_action(act.map, c, T) for c in kn})
    return TransportResult(act, orbit)
