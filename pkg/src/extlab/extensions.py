"""Extensions K -> G -> Q of finite groups.

Sections are left-normalized throughout: for a section ``s`` of ``pi`` the
factor set ``h`` is defined by ``s(q1) s(q2) = i(h(q1, q2)) s(q1 q2)``.
Twisting by a central 2-cocycle ``e`` keeps the carrier and replaces the
product with ``m_e(g1, g2) = i(e(pi g1, pi g2)) g1 g2``.
"""
from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .cochain import (
    Cochain,
    CoefficientModule,
    CohomologyGroup,
    cohomology,
    is_cocycle,
)
from .errors import (
    CoefficientMismatch,
    ExactnessFailure,
    KernelQuotientMismatch,
    NotACocycle,
    NotALifting,
    NotInjective,
    NotNormal,
    NotNormalInQ,
    NotSurjective,
    OuterActionMismatch,
    ValidationError,
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
    center,
    compose_perms,
    conjugation_perm,
    coset_quotient,
    extend_generators,
    fingerprint,
    generating_set,
    invert_perm,
    is_normal,
    make_homomorphism,
    outer_automorphisms,
    restrict_perm,
    validate_group,
)


def _as_hom(source: Group, target: Group, m) -> Homomorphism:
    if isinstance(m, Homomorphism):
        if m.source != source or m.target != target:
            raise ValidationError("homomorphism has the wrong source or target")
        return make_homomorphism(source, target, m.map)
    return make_homomorphism(source, target, m)


@dataclass(frozen=True, eq=False)
class Extension:
    """A validated short exact sequence K -i-> G -pi-> Q."""

    K: Group
    G: Group
    Q: Group
    i: Homomorphism
    pi: Homomorphism

    def __repr__(self):
        return f"<Extension |K|={self.K.order} |G|={self.G.order} |Q|={self.Q.order}>"

    @cached_property
    def image(self) -> Subgroup:
        return Subgroup(self.G, self.i.map)

    @cached_property
    def _iinv(self) -> dict:
        return {g: k for k, g in enumerate(self.i.map)}

    def i_inverse(self, g: int) -> int:
        try:
            return self._iinv[int(g)]
        except KeyError:
            raise ExactnessFailure(f"element {g} is not in the image of i") from None

    @cached_property
    def section(self) -> tuple:
        """Least-index preimage of each element of Q."""
        out = [None] * self.Q.order
        for g, q in enumerate(self.pi.map):
            if out[q] is None:
                out[q] = g
        return tuple(out)

    def conj_on_K(self, g: int) -> tuple:
        """The automorphism k -> i^-1(g i(k) g^-1) of K."""
        G = self.G
        gi = G.inverse(g)
        return tuple(self.i_inverse(G.product(g, self.i(k), gi)) for k in range(self.K.order))

    @cached_property
    def center_sub(self) -> Subgroup:
        return center(self.K)

    @cached_property
    def zk(self) -> tuple[Group, Homomorphism]:
        """Z(K) as a stand-alone group with its inclusion into K."""
        Zg, inc = self.center_sub.as_group()
        Zg = Group(Zg.table, name=f"Z({self.K.name})" if self.K.name else "Z(K)")
        return Zg, Homomorphism(Zg, self.K, inc.map)

    def zk_to_G(self, z: int) -> int:
        return self.i(self.zk[1](z))

    def G_to_zk(self, g: int) -> int:
        k = self.i_inverse(g)
        return self.center_sub.position(k)


def make_extension(K: Group, G: Group, Q: Group, i, pi) -> Extension:
    i = _as_hom(K, G, i)
    pi = _as_hom(G, Q, pi)
    if not i.is_injective:
        raise NotInjective("i is not injective")
    if not pi.is_surjective:
        raise NotSurjective("pi is not surjective")
    img = set(i.map)
    ker = set(pi.kernel().members)
    if img != ker:
        raise ExactnessFailure("image(i) differs from kernel(pi)")
    if not is_normal(G, Subgroup(G, tuple(img))):  # pragma: no cover - kernels are normal
        raise NotNormal("image(i) is not normal")
    return Extension(K, G, Q, i, pi)


# ---------------------------------------------------------------------------
# outer actions


@dataclass(frozen=True, eq=False)
class OuterAction:
    """theta: Q -> Out(K), stored as Out(K) class indices."""

    Q: Group
    K: Group
    out: CosetQuotient
    map: tuple

    def __eq__(self, other):
        return (
            isinstance(other, OuterAction)
            and self.Q == other.Q
            and self.K == other.K
            and self.map == other.map
        )

    def __hash__(self):
        return hash(self.map)

    def rep_perm(self, q: int) -> tuple:
        """Lexicographically least automorphism of K in the class theta(q)."""
        return self.out.rep_perm(self.map[q])

    def canonical_lifting(self) -> tuple:
        return tuple(self.rep_perm(q) for q in range(self.Q.order))

    def as_homomorphism(self) -> Homomorphism:
        return make_homomorphism(self.Q, self.out.quotient, self.map)

    @cached_property
    def center_module(self) -> CoefficientModule:
        """Q acting on Z(K); independent of the chosen lifts."""
        Zs = center(self.K)
        Zg, _ = Zs.as_group()
        Zg = Group(Zg.table, name=f"Z({self.K.name})" if self.K.name else "Z(K)")
        action = [restrict_perm(self.rep_perm(q), Zs) for q in range(self.Q.order)]
        return CoefficientModule(self.Q, Zg, action, name=Zg.name)

    def is_trivial(self) -> bool:
        return all(c == 0 for c in self.map)


def outer_action(ext: Extension, bound: int = DEFAULT_SEARCH_BOUND) -> OuterAction:
    out = outer_automorphisms(ext.K, bound)
    vals = [None] * ext.Q.order
    for g in range(ext.G.order):
        q = ext.pi(g)
        c = out.class_of_perm(ext.conj_on_K(g))
        if vals[q] is None:
            vals[q] = c
        elif vals[q] != c:  # pragma: no cover - guaranteed for valid extensions
            raise ExactnessFailure(f"conjugation class over {q} is not well defined")
    make_homomorphism(ext.Q, out.quotient, vals)
    return OuterAction(ext.Q, ext.K, out, tuple(vals))


def outer_action_from_automorphisms(Q: Group, K: Group, perms: Sequence[Sequence[int]],
                                    bound: int = DEFAULT_SEARCH_BOUND) -> OuterAction:
    """Outer action induced by a lifting q -> automorphism of K.

    The lifting need not be a homomorphism, but its image in Out(K) must be.
    """
    out = outer_automorphisms(K, bound)
    if len(perms) != Q.order:
        raise ValidationError("need one automorphism per element of Q")
    aut = out.automorphisms
    vals = []
    for p in perms:
        p = tuple(int(x) for x in p)
        if p not in aut:
            raise ValidationError(f"{p} is not an automorphism of K")
        vals.append(out.class_of_perm(p))
    try:
        make_homomorphism(Q, out.quotient, vals)
    except Exception as exc:
        raise ValidationError(f"theta is not a homomorphism into Out(K): {exc}") from None
    return OuterAction(Q, K, out, tuple(vals))


# ---------------------------------------------------------------------------
# sections and factor sets


@dataclass(frozen=True, eq=False)
class SectionedExtension:
    ext: Extension
    delta: tuple  # automorphisms of K, one per element of Q
    s: PartialMap


@dataclass(frozen=True, eq=False)
class FactorSet:
    values: np.ndarray  # [q1, q2] -> element of K
    K: Group
    Q: Group
    delta: tuple

    def __call__(self, q1: int, q2: int) -> int:
        return int(self.values[q1, q2])

    def is_valid(self) -> bool:
        K, Q, h = self.K, self.Q, self.values
        n = Q.order
        if h[0, :].any() or h[:, 0].any():
            return False
        for a in range(n):
            da = self.delta[a]
            for b in range(n):
                ab = Q.mul(a, b)
                for c in range(n):
                    lhs = K.mul(h[a, b], h[ab, c])
                    rhs = K.mul(da[h[b, c]], h[a, Q.mul(b, c)])
                    if lhs != rhs:
                        return False
        return True


def delta_section(ext: Extension, delta: Sequence[Sequence[int]] | None = None,
                  theta: OuterAction | None = None) -> SectionedExtension:
    """Least-index section s with conj(s(q)) = delta(q) on K."""
    theta = theta or outer_action(ext)
    if delta is None:
        delta = theta.canonical_lifting()
    delta = tuple(tuple(int(x) for x in d) for d in delta)
    s = []
    for q in range(ext.Q.order):
        d = delta[q]
        if d not in theta.out.automorphisms or theta.out.class_of_perm(d) != theta.map[q]:
            raise NotALifting(f"delta({q}) does not lie over theta({q})")
        pick = next((g for g in ext.pi.preimages(q) if ext.conj_on_K(g) == d), None)
        if pick is None:  # pragma: no cover - conjugation by K reaches all of Inn(K)
            raise NotALifting(f"no preimage of {q} induces delta({q})")
        s.append(pick)
    if s[0] != 0:
        raise NotALifting("delta(1) must be the identity")
    return SectionedExtension(ext, delta, PartialMap(ext.Q, ext.G, s))


def factor_set(se: SectionedExtension) -> FactorSet:
    ext, s = se.ext, se.s.map
    G, Q = ext.G, ext.Q
    n = Q.order
    h = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            h[a, b] = ext.i_inverse(G.product(s[a], s[b], G.inverse(s[Q.mul(a, b)])))
    return FactorSet(h, ext.K, Q, se.delta)


def _twisted_table(G: Group, pi_arr: np.ndarray, central_vals: np.ndarray, to_G: np.ndarray) -> np.ndarray:
    E = central_vals[pi_arr[:, None], pi_arr[None, :]]
    return G.table[to_G[E], G.table]


def twist_extension(e: Cochain, se: SectionedExtension, theta: OuterAction | None = None) -> SectionedExtension:
    """Twist of G by e: same carrier, product m_e(g1, g2) = i(e(pi g1, pi g2)) g1 g2."""
    ext = se.ext
    theta = theta or outer_action(ext)
    M = theta.center_module
    if e.degree != 2 or e.module.coeffs != M.coeffs or not np.array_equal(e.module.action, M.action):
        raise CoefficientMismatch("e must be a 2-cochain with values in the Q-module Z(K)")
    if not is_cocycle(e):
        raise NotACocycle("e is not a 2-cocycle")
    to_G = np.array([ext.zk_to_G(z) for z in range(M.coeffs.order)], dtype=np.int64)
    t = _twisted_table(ext.G, ext.pi.arr, e.values, to_G)
    G2 = validate_group(t, name=f"twist({ext.G.name})" if ext.G.name else None)
    new = make_extension(ext.K, G2, ext.Q, ext.i.map, ext.pi.map)
    s = PartialMap(new.Q, G2, se.s.map)
    for q in range(new.Q.order):
        if new.conj_on_K(s(q)) != se.delta[q]:  # pragma: no cover - e is central
            raise NotALifting("twisting changed the conjugation action")
    return SectionedExtension(new, se.delta, s)


# ---------------------------------------------------------------------------
# differences and isomorphisms


_H_CACHE: dict = {}


def cohomology_cached(n: int, M: CoefficientModule) -> CohomologyGroup:
    key = (n, M)
    hit = _H_CACHE.get(key)
    if hit is None:
        hit = cohomology(n, M)
        _H_CACHE[key] = hit
    return hit


@dataclass
class Difference:
    cls: int
    cocycle: Cochain  # h' h^-1 with values in Z(K)
    H2: CohomologyGroup
    bounding: Cochain  # cocycle = rep . d(bounding)


def _same_frame(a: Extension, b: Extension):
    if a.K != b.K or a.Q != b.Q:
        raise KernelQuotientMismatch("extensions must share K and Q")


def extension_difference(ext2: Extension, ext: Extension, theta: OuterAction | None = None) -> Difference:
    """Class [e] such that ext2 is ext twisted by e."""
    _same_frame(ext2, ext)
    th = theta or outer_action(ext)
    th2 = outer_action(ext2)
    if th2 != th:
        raise OuterActionMismatch("extensions have different outer actions")
    delta = th.canonical_lifting()
    h = factor_set(delta_section(ext, delta, th))
    h2 = factor_set(delta_section(ext2, delta, th2))
    K = ext.K
    Zs = ext.center_sub
    n = ext.Q.order
    vals = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            k = K.mul(h2(a, b), K.inverse(h(a, b)))
            if k not in Zs:
                raise ValidationError("factor sets differ by a non-central element")
            vals[a, b] = Zs.position(k)
    M = th.center_module
    d = Cochain(2, M, vals)
    H2 = cohomology_cached(2, M)
    cls, b = H2.classify(d)
    return Difference(cls, d, H2, b)


def are_isomorphic_extensions(ext1: Extension, ext2: Extension) -> Homomorphism | None:
    """An isomorphism G1 -> G2 compatible with i and pi, or None."""
    _same_frame(ext1, ext2)
    th1, th2 = outer_action(ext1), outer_action(ext2)
    if th1 != th2:
        return None
    diff = extension_difference(ext2, ext1, th1)
    if diff.cls != 0:
        return None
    # h2 = d(b) h1, so the section i(b) s1 of G1 has the factor set of s2
    delta = th1.canonical_lifting()
    s1 = delta_section(ext1, delta, th1).s.map
    s2 = delta_section(ext2, delta, th2).s.map
    G1, G2 = ext1.G, ext2.G
    b = diff.bounding
    s1b = [G1.mul(ext1.zk_to_G(b(q)), s1[q]) for q in range(ext1.Q.order)]
    phi = []
    for g in range(G1.order):
        q = ext1.pi(g)
        n = ext1.i_inverse(G1.mul(g, G1.inverse(s1b[q])))
        phi.append(G2.mul(ext2.i(n), s2[q]))
    iso = make_homomorphism(G1, G2, phi)
    if not iso.is_injective:  # pragma: no cover
        raise ExactnessFailure("reconstructed map is not bijective")
    return iso


def brute_force_extension_isomorphism(ext1: Extension, ext2: Extension) -> Homomorphism | None:
    """Exhaustive search over maps fixed on i(K) and respecting pi (oracle)."""
    _same_frame(ext1, ext2)
    G1, G2 = ext1.G, ext2.G
    gens = generating_set(G1)
    fibers = [ext2.pi.preimages(ext1.pi(g)) for g in gens]

    def rec(k, imgs):
        if k == len(gens):
            m = extend_generators(G1, G2, gens, imgs)
            if m is None or len(m) != G1.order:
                return None
            vec = [m[a] for a in range(G1.order)]
            if len(set(vec)) != len(vec):
                return None
            if any(vec[ext1.i(x)] != ext2.i(x) for x in range(ext1.K.order)):
                return None
            if any(ext2.pi(vec[g]) != ext1.pi(g) for g in range(G1.order)):
                return None
            return vec
        for h in fibers[k]:
            if extend_generators(G1, G2, gens[: k + 1], imgs + [h]) is None:
                continue
            got = rec(k + 1, imgs + [h])
            if got is not None:
                return got
        return None

    vec = rec(0, [])
    return None if vec is None else make_homomorphism(G1, G2, vec)


def table_hash(G: Group) -> str:
    return hashlib.sha256(np.ascontiguousarray(G.table, dtype="<i8").tobytes()).hexdigest()[:16]


@dataclass
class ClassRecord:
    index: int
    cocycle: Cochain
    sectioned: object  # SectionedExtension or SectionedIterext
    fingerprint: dict
    table_hash: str
    identified: list = field(default_factory=list)

    @property
    def group(self) -> Group:
        return self.sectioned.ext.G if hasattr(self.sectioned, "ext") else self.sectioned.ie.G

    def to_json(self) -> dict:
        return {
            "class": self.index,
            "cocycle": self.cocycle.values.tolist(),
            "table_hash": self.table_hash,
            "order_census": self.fingerprint["census"],
            "fingerprint": self.fingerprint,
            "identified_as": self.identified,
        }


def _map(fn, items, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def classify_extensions(base: Extension, threads: int = 1) -> list[ClassRecord]:
    """One twist of base per class of H^2(Q, Z(K)), in class order."""
    from .catalog import identify

    th = outer_action(base)
    se = delta_section(base, theta=th)
    H2 = cohomology_cached(2, th.center_module)

    def build(k):
        rep = H2.classes[k]
        tw = twist_extension(rep, se, th)
        back = extension_difference(tw.ext, base, th).cls
        if back != k:
            raise ExactnessFailure(f"round trip of class {k} gave {back}")
        G = tw.ext.G
        return ClassRecord(k, rep, tw, fingerprint(G), table_hash(G), identify(G))

    return _map(build, range(H2.order), threads)


# ---------------------------------------------------------------------------
# automorphisms fixing K and Q


@dataclass
class AutDictionary:
    """The isomorphism Z^1 -> Aut fixing the kernel and the quotient.

    ``cocycles[k]`` corresponds to ``automorphisms[k]``.
    """

    module: CoefficientModule
    H1: CohomologyGroup
    cocycles: list
    automorphisms: list
    group: AutomorphismGroup
    forward: object
    inverse: object
    coboundary_image: object
    inner_sub: Subgroup  # conjugations by the coefficient group inside ``group``
    out: CosetQuotient
    class_map: tuple  # H^1 class -> out.quotient index

    def check(self) -> list[str]:
        """Return a list of violated properties (empty when all hold)."""
        bad = []
        for lam, xi in zip(self.cocycles, self.automorphisms):
            if self.inverse(xi) != lam:
                bad.append("inverse o forward != id")
                break
        for xi in self.group.elements:
            if self.forward(self.inverse(xi)) != xi:
                bad.append("forward o inverse != id")
                break
        for l1, x1 in zip(self.cocycles, self.automorphisms):
            for l2, x2 in zip(self.cocycles, self.automorphisms):
                if self.forward(l1 * l2) != compose_perms(x1, x2):
                    bad.append("not multiplicative")
                    break
            else:
                continue
            break
        if not self.group.table.is_abelian:
            bad.append("automorphism group not abelian")
        if len(set(self.automorphisms)) != len(self.automorphisms):
            bad.append("forward map not injective")
        return bad


def extension_automorphisms(ext: Extension, theta: OuterAction | None = None) -> AutDictionary:
    th = theta or outer_action(ext)
    M = th.center_module
    H1 = cohomology_cached(1, M)
    G = ext.G
    pi = ext.pi.arr
    to_G = np.array([ext.zk_to_G(z) for z in range(M.coeffs.order)], dtype=np.int64)
    s = ext.section

    def forward(lam: Cochain) -> tuple:
        return tuple(int(x) for x in G.table[to_G[lam.values[pi]], np.arange(G.order)])

    def inverse(xi) -> Cochain:
        vals = [ext.G_to_zk(G.mul(xi[s[q]], G.inverse(s[q]))) for q in range(ext.Q.order)]
        return Cochain(1, M, vals)

    def coboundary_image(z0: int, invert: bool = True) -> tuple:
        z = M.coeffs.inverse(z0) if invert else z0
        return conjugation_perm(G, int(to_G[z]))

    cocycles = H1.cocycles()
    autos = [forward(lam) for lam in cocycles]
    grp = AutomorphismGroup(G, autos, name="Aut(KGQ)")
    inner = grp.subgroup({coboundary_image(z) for z in range(M.coeffs.order)})
    out = coset_quotient(grp.table, inner, automorphisms=grp)
    cmap = tuple(out.class_of_perm(forward(rep)) for rep in H1.classes)
    return AutDictionary(M, H1, cocycles, autos, grp, forward, inverse, coboundary_image, inner, out, cmap)


def brute_force_aut_KGQ(ext: Extension) -> list[tuple]:
    """Automorphisms of G fixing i(K) pointwise and inducing the identity on Q."""
    aut = automorphism_group(ext.G, max(DEFAULT_SEARCH_BOUND, ext.G.order))
    out = []
    for p in aut.elements:
        if all(p[g] == g for g in ext.i.map) and all(ext.pi(p[g]) == ext.pi(g) for g in range(ext.G.order)):
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# P-subextensions


def pqr_extension(Q: Group, P: Subgroup, name_R: str | None = None) -> Extension:
    """The extension P -> Q -> Q/P for a normal subgroup P."""
    if not is_normal(Q, P):
        raise NotNormalInQ("P is not normal in Q")
    Pg, jbar = P.as_group()
    Pg = Group(Pg.table, name=f"P<{Q.name}" if Q.name else None)
    cq = coset_quotient(Q, P)
    R = Group(cq.quotient.table, name=name_R)
    return make_extension(Pg, Q, R, jbar.map, cq.projection.map)


def p_subextension(ext: Extension, P: Subgroup) -> tuple[Extension, Homomorphism]:
    """N = pi^-1(P) as an extension of K by P, plus the inclusion N -> G."""
    if P.ambient != ext.Q:
        raise ValidationError("P must be a subgroup of Q")
    if not is_normal(ext.Q, P):
        raise NotNormalInQ("P is not normal in Q")
    N = Subgroup(ext.G, tuple(g for g in range(ext.G.order) if ext.pi(g) in P))
    Ng, j = N.as_group()
    Pg, _ = P.as_group()
    Pg = Group(Pg.table, name=f"P<{ext.Q.name}" if ext.Q.name else None)
    i0 = [N.position(ext.i(k)) for k in range(ext.K.order)]
    pi0 = [P.position(ext.pi(j(n))) for n in range(Ng.order)]
    knp = make_extension(ext.K, Ng, Pg, i0, pi0)
    return knp, make_homomorphism(Ng, ext.G, j.map)


@dataclass
class RestrictedDifference:
    via_restriction: int
    via_subextensions: int
    H2P: CohomologyGroup

    @property
    def agree(self) -> bool:
        return self.via_restriction == self.via_subextensions


def restriction_of_difference(ext2: Extension, ext: Extension, P: Subgroup) -> RestrictedDifference:
    diff = extension_difference(ext2, ext)
    knp, jN = p_subextension(ext, P)
    knp2, _ = p_subextension(ext2, P)
    th_P = outer_action(knp)
    M_P = th_P.center_module
    H2P = cohomology_cached(2, M_P)
    jbar = np.array(P.members, dtype=np.int64)
    restricted = Cochain(2, M_P, diff.cocycle.values[jbar[:, None], jbar[None, :]])
    a = H2P.class_of(restricted)
    b = extension_difference(knp2, knp, th_P).cls
    return RestrictedDifference(a, b, H2P)


def conj_perm_on_sub(G: Group, g: int, sub: Subgroup) -> tuple:
    """Conjugation by g restricted to a normal subgroup, in sub's labels."""
    return restrict_perm(conjugation_perm(G, g), sub)

