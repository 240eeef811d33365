"""Exception hierarchy for the unicity package.

Every error raised on purpose by this package derives from
:class:`UnicityError`, so callers can catch one base class. Errors that
signal bad argument values additionally derive from :class:`ValueError`.
"""

from __future__ import annotations


class UnicityError(Exception):
    """Base class for all errors raised by this package."""


class EmptyDatasetError(UnicityError, ValueError):
    """The input contains no records, or an operation removed them all."""


class UnknownItemError(UnicityError, KeyError):
    """An item id or token is not present in the dataset's symbol table."""


class InvalidSizeError(UnicityError, ValueError):
    """A requested subsample or curve size is outside [1, number of records]."""


class NoEligibleRecordError(UnicityError):
    """No record has at least K items, so the K-subset state space is empty."""


class NotInDatasetError(UnicityError):
    """The queried item subset has support 0, but support >= 1 is required."""


class InsufficientTraceError(UnicityError, ValueError):
    """The chain trace is too short for the convergence diagnostic."""


class NotConvergedError(UnicityError):
    """The chain hit its step budget before the diagnostic detected convergence.

    Carries the diagnostic history in ``z_history`` as a list of
    ``(step, z)`` pairs recorded up to the point of failure.
    """

    def __init__(self, message: str, z_history=None):
        super().__init__(message)
        self.z_history = list(z_history) if z_history is not None else []


class EnumerationBudgetError(UnicityError):
    """Exhaustive K-subset enumeration would exceed the allowed budget."""


class RejectionBudgetError(UnicityError):
    """Rejection sampling used up all tries without an accepted sample."""


class UndefinedResultError(UnicityError):
    """The requested quantity is undefined on this input (empty state space)."""


class InvalidSpecError(UnicityError, ValueError):
    """A parameter specification is out of range or internally inconsistent."""


class InsufficientDataError(UnicityError, ValueError):
    """Too few data points for the requested split or fit."""


class FitError(UnicityError):
    """The nonlinear least-squares fit could not proceed (singular system)."""


class BoundUndefinedError(UnicityError, ValueError):
    """The mixing-time bound is undefined for the given arguments."""
