"""
Classifying extensions by second cohomology
===========================================

Starting from one extension K -> G -> Q, every other extension with the
same outer action is a twist of G by a 2-cocycle with values in Z(K).
"""

from extlab import catalog
from extlab.extensions import (
    brute_force_aut_KGQ,
    classify_extensions,
    extension_automorphisms,
    extension_difference,
    make_extension,
)

C2, V, G = catalog.get("C2"), catalog.get("C2xC2"), catalog.get("C2xC2xC2")

# the split extension C2 -> C2 x C2 x C2 -> C2 x C2
base = make_extension(C2, G, V, [0, 4], [g % 4 for g in range(8)])

records = classify_extensions(base)
for r in records:
    print(f"class {r.index}: census {r.fingerprint['census']} identified as {r.identified}")

# the difference of a twist and the base recovers its class
tw = records[5].sectioned.ext
print("difference class:", extension_difference(tw, base).cls)

# automorphisms fixing K and inducing the identity on Q are 1-cocycles
d = extension_automorphisms(tw)
print("|Aut(KGQ)| =", len(d.automorphisms), "brute force:", len(brute_force_aut_KGQ(tw)))
print("dictionary checks failing:", d.check())
