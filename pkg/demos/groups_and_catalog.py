"""
Finite groups as multiplication tables
======================================

Groups are dense numpy tables with the identity at index 0.  The catalog
ships a handful of small groups; everything else is built from tables.
"""

import numpy as np

from extlab import catalog
from extlab.groups import (
    automorphism_group,
    center,
    coset_quotient,
    direct_product,
    find_isomorphism,
    fingerprint,
    inner_automorphisms,
    validate_group,
)

# every catalog entry, with its order and whether it is abelian
for name in catalog.names():
    G = catalog.get(name)
    print(f"{name:10s} order {G.order:2d} abelian {G.is_abelian}")

# D4: center, automorphisms, inner and outer automorphisms
D4 = catalog.get("D4")
Z = center(D4)
inn, _ = inner_automorphisms(D4)
print("Z(D4) =", Z.members, "|Aut| =", automorphism_group(D4).order, "|Inn| =", inn.order)

# the quotient by the center is a Klein four group
cq = coset_quotient(D4, Z)
print("D4/Z is C2xC2:", find_isomorphism(cq.quotient, catalog.get("C2xC2")) is not None)

# direct products index pairs as g * |H| + h
G = direct_product(catalog.get("C2"), catalog.get("S3"))
print("C2 x S3 identified as", catalog.identify(G))

# a relabelled table is validated and recognised by its fingerprint
perm = np.array([0, 2, 1, 3])
C4 = catalog.get("C4")
inv = np.argsort(perm)
H = validate_group(perm[C4.table[inv[:, None], inv[None, :]]])
print("relabelled C4 fingerprint matches:", fingerprint(H) == fingerprint(C4))
