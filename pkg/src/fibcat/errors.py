"""Exception hierarchy.

Exit-code mapping used by the CLI lives in cli.py; the classes here only
classify failures: schema problems, categorical law violations, unmet
structural preconditions, and resource guards.
"""


class FibcatError(Exception):
    """Base class for all package errors."""


class SchemaError(FibcatError):
    """Malformed or inconsistent input data (unknown ids, bad shapes)."""


class UnknownObject(SchemaError):
    pass


class UnknownMorphism(SchemaError):
    pass


class TargetMismatch(SchemaError):
    """A morphism pair was composed against its typing."""


class LawViolation(FibcatError):
    """A categorical law (identity, associativity, closure) fails."""


class FunctorialityViolation(LawViolation):
    """A functor or transformation breaks identities, composition or naturality."""


class PreconditionError(FibcatError):
    """A structural precondition of an operation is not met."""


class MissingTerminal(PreconditionError):
    pass


class MissingPullback(PreconditionError):
    pass


class MissingPushout(PreconditionError):
    pass


class MissingLift(PreconditionError):
    """A required co-/cartesian lift does not exist."""


class NotCocartesian(PreconditionError):
    pass


class NotCartesian(PreconditionError):
    pass


class NoFactorization(PreconditionError):
    """A filler problem has no (or no unique) base factorization."""


class NotFibered(PreconditionError):
    """A functor does not commute with the projections."""


class NotBicartesian(PreconditionError):
    pass


class NotLex(PreconditionError):
    pass


class NotBeckChevalley(PreconditionError):
    pass


class NotPreMoens(PreconditionError):
    pass


class NotMoens(PreconditionError):
    pass


class NotGeneralizedMoens(PreconditionError):
    pass


class NotTerminalPreserving(PreconditionError):
    pass


class SizeGuardExceeded(FibcatError):
    """A construction would exceed the morphism-count guard."""
