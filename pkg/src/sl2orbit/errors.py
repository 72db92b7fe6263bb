"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`Sl2OrbitError`, so callers (and the CLI) can separate domain
failures from programming mistakes.
"""


class Sl2OrbitError(Exception):
    """Base class for library errors."""


class InvalidInput(Sl2OrbitError, ValueError):
    """Malformed or non-finite input data."""


class InvalidWord(Sl2OrbitError, ValueError):
    """A word refers to a generator outside the tuple."""


class NotSL2(Sl2OrbitError, ValueError):
    """An operation that needs determinant-one matrices got something else."""


class SingularConjugator(Sl2OrbitError, ValueError):
    """Attempt to conjugate by a non-invertible matrix."""


class CoordinateUnavailable(Sl2OrbitError, KeyError):
    """A trace coordinate is not part of the trace-vector layout."""

    def __str__(self):
        return Exception.__str__(self)


class NotApplicable(Sl2OrbitError, ValueError):
    """Preconditions of a normal form are not met (e.g. sigma_12 vanishes)."""


class NotIrreducible(Sl2OrbitError, ValueError):
    """Operation requires an irreducible tuple."""


class DegenerateEigenvalues(Sl2OrbitError, ValueError):
    """A component that must have distinct eigenvalues does not."""


class InvalidBase(Sl2OrbitError, ValueError):
    """A fiber base point does not satisfy its preconditions."""


class NumericalFailure(Sl2OrbitError, ArithmeticError):
    """A computation could not be completed to the requested accuracy."""
