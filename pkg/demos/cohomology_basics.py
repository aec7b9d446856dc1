"""
Cohomology of a finite group with abelian coefficients
======================================================

A coefficient module is an abelian group with an action given as one
permutation per element of the acting group.  Cohomology in degrees 1 and 2
is computed by linear algebra over Z/N and compared with plain enumeration.
"""

from extlab import catalog
from extlab.cochain import (
    Cochain,
    CoefficientModule,
    brute_force_cohomology,
    coboundary,
    cohomology,
)

C2, C4 = catalog.get("C2"), catalog.get("C4")

# C2 acting on C4 by inversion
M = CoefficientModule(C2, C4, [[0, 1, 2, 3], [0, 3, 2, 1]], name="C4 inverted")

# the degree-0 coboundary carries an inversion: d(z0)(q) = z0^-1 . q(z0)
print("d(1) =", coboundary(Cochain(0, M, 1)).values.tolist())

for n in (1, 2):
    H = cohomology(n, M)
    B = brute_force_cohomology(n, M)
    print(f"H^{n}: order {H.order}, invariants {H.invariant_factors}; enumeration gives {B.order}")

# every cocycle decomposes as representative times a coboundary
H2 = cohomology(2, CoefficientModule.trivial(catalog.get("C2xC2"), C2))
c = H2.classes[3] * coboundary(Cochain(1, H2.module, [0, 1, 0, 0]))
idx, b = H2.classify(c)
print("class", idx, "bounding cochain", b.values.tolist())
print("H^2(C2xC2, C2) =", H2.invariant_factors)
