"""Shared desk-scale inputs for the test suite."""
from functools import lru_cache

from extlab import catalog
from extlab.extensions import make_extension
from extlab.groups import Subgroup, center, coset_quotient, direct_product, find_isomorphism


def _onto(sub_members, G, target):
    """Labels of ``target`` carried onto the subgroup ``sub_members`` of G."""
    H, emb = Subgroup(G, tuple(sub_members)).as_group()
    iso = find_isomorphism(target, H)
    return [emb(iso[x]) for x in range(target.order)]


def _quotient_map(G, N_members, target):
    cq = coset_quotient(G, Subgroup(G, tuple(N_members)))
    iso = find_isomorphism(cq.quotient, target)
    return [iso[cq.projection(g)] for g in range(G.order)]


def _ext(K, G, Q, N_members):
    K, G, Q = (catalog.get(x) if isinstance(x, str) else x for x in (K, G, Q))
    return make_extension(K, G, Q, _onto(N_members, G, K), _quotient_map(G, N_members, Q))


@lru_cache(maxsize=None)
def base_extensions():
    """name -> extension; the catalog bases used across the suite."""
    S3, D4, A4, Q8 = (catalog.get(n) for n in ("S3", "D4", "A4", "Q8"))
    C2 = catalog.get("C2")
    rot3 = [g for g in range(6) if S3.element_order(g) in (1, 3)]
    rot4 = sorted({0} | {g for g in range(8) if D4.element_order(g) == 4} | set(center(D4).members))
    klein = [g for g in range(12) if A4.element_order(g) in (1, 2)]
    return {
        "C2.C2": _ext("C2", "C2xC2", "C2", [0, 2]),
        "C2.C2xC2": _ext("C2", "C2xC2xC2", "C2xC2", [0, 4]),
        "C2.C4": _ext("C2", "C2xC4", "C4", [0, 4]),
        "C3.C2": _ext("C3", S3, "C2", rot3),
        "C4.C2": _ext("C4", D4, "C2", rot4),
        "C2.S3": _ext("C2", direct_product(C2, S3), "S3", [0, 6]),
        "C2xC2.C3": _ext("C2xC2", A4, "C3", klein),
        "C2.C2xC2(Q8)": _ext("C2", Q8, "C2xC2", list(center(Q8).members)),
        "S3.C2": _ext("S3", direct_product(S3, C2), "C2", [2 * s for s in range(6)]),
    }


def cochain_count(n, M):
    return M.coeffs.order ** ((M.actor.order - 1) ** n)


@lru_cache(maxsize=None)
def catalog_modules(limit=10**6):
    """Every (actor, abelian coeffs, action) from the catalog with at most
    ``limit`` normalized 2-cochains; actions run over Hom(actor, Aut(coeffs))."""
    from extlab.cochain import CoefficientModule
    from extlab.groups import automorphism_group, homomorphisms

    out = []
    names = catalog.names()
    for a in names:
        A = catalog.get(a)
        if not A.is_abelian:
            continue
        aut = automorphism_group(A)
        for q in names:
            Q = catalog.get(q)
            if A.order ** ((Q.order - 1) ** 2) > limit:
                continue
            for k, h in enumerate(homomorphisms(Q, aut.table)):
                action = [aut.elements[h[x]] for x in range(Q.order)]
                out.append(CoefficientModule(Q, A, action, name=f"{q} on {a} #{k}"))
    return tuple(out)


@lru_cache(maxsize=None)
def strict_iterext():
    """C2 x D4 cut along a Klein four subgroup of D4.

    R = C2 swaps two classes of H^1(P, Z/2), so Theta-compatibility is a
    proper condition here.
    """
    from extlab.groups import subgroup_generated
    from extlab.iterext import iterext_from_extension

    C2, D4 = catalog.get("C2"), catalog.get("D4")
    G = direct_product(C2, D4, "C2xD4")
    ext = make_extension(C2, G, D4, [0, 8], [g % 8 for g in range(16)])
    klein = next(
        S for S in (subgroup_generated(D4, [a, b]) for a in range(8) for b in range(8))
        if S.order == 4 and all(D4.element_order(x) <= 2 for x in S.members)
    )
    return iterext_from_extension(ext, klein)
