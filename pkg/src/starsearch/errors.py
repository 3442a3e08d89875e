"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class StarSearchError(Exception):
    """Base class for all errors raised by :mod:`starsearch`."""


class DomainError(StarSearchError, ValueError):
    """A numeric argument lies outside the domain of the operation."""


class InvalidStrategy(StarSearchError, ValueError):
    """A strategy violates a structural invariant (ordering, ray range, ...)."""


class SchemaError(StarSearchError, ValueError):
    """A JSON document does not match the expected schema."""


class NotFound(StarSearchError):
    """No iteration of the strategy ever reaches the target."""


class TooFewBranches(StarSearchError):
    """The advice budget cannot support at least two parallel branches."""


class GameOver(StarSearchError):
    """The liar game ran out of queries with several candidates alive."""


class AmbiguousDecoding(StarSearchError):
    """The advice protocol finished with more than one surviving branch."""


class EmptyErrorClass(StarSearchError):
    """No target is consistent with the requested prediction-error class."""
