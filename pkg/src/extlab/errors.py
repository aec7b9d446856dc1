"""Exception hierarchy shared by all modules.

Every error carries the first witness that triggered it, so messages can be
turned into reproducible bug reports.
"""


class ExtlabError(Exception):
    """Base class for all library errors."""


class ValidationError(ExtlabError):
    """Input data violates a structural precondition (CLI exit code 2)."""


class CheckFailure(ExtlabError):
    """A mathematical verification failed (CLI exit code 1)."""


# groups
class NotClosed(ValidationError):
    pass


class NoIdentityAtZero(ValidationError):
    pass


class NoInverse(ValidationError):
    def __init__(self, element):
        super().__init__(f"element {element} has no two-sided inverse")
        self.element = element


class NotAssociative(ValidationError):
    def __init__(self, a, b, c):
        super().__init__(f"(a*b)*c != a*(b*c) for a={a}, b={b}, c={c}")
        self.witness = (a, b, c)


class NotAHomomorphism(ValidationError):
    pass


class NotNormal(ValidationError):
    pass


class SearchBoundExceeded(ExtlabError):
    pass


class KernelMismatch(ValidationError):
    pass


# cochain
class DegreeTooHigh(ValidationError):
    pass


class NotACocycle(ValidationError):
    pass


class SizeBoundExceeded(ExtlabError):
    pass


class NotWellDefined(CheckFailure):
    pass


class CoefficientMismatch(ValidationError):
    pass


class NoInvarianceWitness(ValidationError):
    pass


class NotInH2P(ValidationError):
    pass


# extensions
class NotInjective(ValidationError):
    pass


class NotSurjective(ValidationError):
    pass


class ExactnessFailure(ValidationError):
    pass


class NotALifting(ValidationError):
    pass


class OuterActionMismatch(ValidationError):
    pass


class KernelQuotientMismatch(ValidationError):
    pass


class NotNormalInQ(ValidationError):
    pass


# iterext
class DiagramFailure(ValidationError):
    pass


class NoSection(ValidationError):
    pass


class ActionMismatch(ValidationError):
    pass


class NotThetaCompatible(ValidationError):
    pass


class NotAProlongation(ValidationError):
    pass


class NotExtensionIso(ValidationError):
    pass


# sixterm / cli
class MalformedCertificate(ValidationError):
    pass


class ParseError(ValidationError):
    pass
