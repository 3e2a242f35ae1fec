"""Exception hierarchy shared by all modules.

The CLI maps :class:`DomainError` subclasses to exit code 2 and
:class:`InputError` to exit code 3.
"""


class CharVarError(Exception):
    pass


class DomainError(CharVarError):
    pass


class InputError(CharVarError):
    pass


class SingularMatrix(DomainError):
    pass


class NotUnimodular(DomainError):
    pass


class FlavorMismatch(DomainError):
    pass


class ConvergenceFailure(DomainError):
    pass


class ToleranceAmbiguous(DomainError):
    pass


class CaseMismatch(DomainError):
    pass


class NotLoxodromic(DomainError):
    pass


class DecompositionFailed(DomainError):
    pass


class NotIrreducible(DomainError):
    pass


class NoConjugator(DomainError):
    pass
