"""
Iterated extensions
===================

An iterated extension K -> N -> G with N/K = P and G/N = R is cut from
an ordinary extension along a normal subgroup P of its quotient Q.
"""

from extlab.iterext import (
    classify_iterexts,
    iterext_automorphisms,
    iterext_difference,
    mod_k_outer_action,
    problem_of,
    prolongation_classify,
    section_iterext,
    theta_compatibility,
    twist_inclusion,
)
from extlab.sixterm import get_instance

# C2 -> C4 -> C8 with Q = C4 and P = 2C4
ie = get_instance("z8").base
print(ie)
print("mod-K outer action:", mod_k_outer_action(ie).map)
print("section u:", section_iterext(ie).u.map)

# automorphisms fixing N and inducing the identity on Q
print("Aut(KNGQR):", iterext_automorphisms(ie).automorphisms)

# two classes, both with total group C8
for r in classify_iterexts(ie):
    print("class", r.index, r.identified)

# twisting the inclusion of N by a compatible automorphism of N
Theta = mod_k_outer_action(ie)
tc = theta_compatibility(ie, Theta)
for eta in tc.compatible:
    print("eta", eta, "-> difference class", iterext_difference(twist_inclusion(ie, eta, Theta), ie).cls)

# prolongations of the action of P to Q, up to conjugacy
pc = prolongation_classify(problem_of(ie))
print("prolongations:", pc.prolongations, "conjugacy classes:", len(pc.conjugacy_classes))

# D4 cut along its rotations has a nontrivial mod-K action
print("D4 mod-K action:", mod_k_outer_action(get_instance("d4").base).map)
