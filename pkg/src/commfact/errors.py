"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures without a lookup table: 3 for malformed input, 4 for a violated
mathematical precondition.
"""


class CommFactError(Exception):
    exit_code = 3


class InvalidInput(CommFactError, ValueError):
    exit_code = 3


class MixedDomain(InvalidInput):
    """Operands live in different scalar domains."""


class NotDivisible(InvalidInput):
    """Embedding target conductor is not a multiple of the source conductor."""


class JMismatch(InvalidInput):
    """Coherent polynomials are expressed over different band matrices."""


class NotProportional(InvalidInput):
    pass


class PreconditionViolated(CommFactError):
    exit_code = 4


class ConductorTooSmall(PreconditionViolated):
    """The requested root of unity does not exist in the ambient field."""


class DivisionByZero(PreconditionViolated, ZeroDivisionError):
    pass


class Singular(PreconditionViolated):
    pass


class NotNormalized(PreconditionViolated):
    pass


class OrderViolated(PreconditionViolated):
    pass


class DegenerateParameter(PreconditionViolated):
    pass


class NotUnimodular(PreconditionViolated):
    pass


class ScalarInput(PreconditionViolated):
    pass


class RetriesExhausted(PreconditionViolated):
    pass


class EigenvalueOne(PreconditionViolated):
    pass
