"""Finite group extensions, iterated extensions and the six-term exact sequence.

Groups are dense multiplication tables with the identity at index 0; every
construction is exact and deterministic.
"""
from .errors import CheckFailure, ExtlabError, ValidationError
from .groups import Group, Homomorphism, Subgroup, make_homomorphism, validate_group
from .cochain import Cochain, CoefficientModule, CohomologyGroup, cohomology
from .extensions import (
    Extension,
    classify_extensions,
    extension_difference,
    make_extension,
    outer_action,
)
from .iterext import IteratedExtension, classify_iterexts, make_iterext, mod_k_outer_action
from .sixterm import Instance, build_sequence, replay_certificate, run_propositions

__version__ = "0.1.0"

__all__ = [
    "CheckFailure",
    "Cochain",
    "CoefficientModule",
    "CohomologyGroup",
    "Extension",
    "ExtlabError",
    "Group",
    "Homomorphism",
    "Instance",
    "IteratedExtension",
    "Subgroup",
    "ValidationError",
    "build_sequence",
    "classify_extensions",
    "classify_iterexts",
    "cohomology",
    "extension_difference",
    "make_extension",
    "make_homomorphism",
    "make_iterext",
    "mod_k_outer_action",
    "outer_action",
    "replay_certificate",
    "run_propositions",
    "validate_group",
]
