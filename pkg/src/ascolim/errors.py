"""Exception taxonomy shared by all modules.

CLI exit codes: ``InputError`` maps to 2, ``ResolutionExceededError`` to 3,
and a written report containing failed property checks to 4.
"""


class AscolimError(Exception):
    """Base class for package errors."""


class InputError(AscolimError):
    """Malformed or out-of-contract input (dimension mismatch, bad poset, ...)."""


class ResolutionExceededError(AscolimError):
    """A bounded search (bisection, subdivision, Lebesgue number) ran out of depth."""


class AbsorptionError(AscolimError):
    """A compact sample escapes every step of the filtration.

    Carries the escaping point as ``witness``; this is the model-level
    signature of a non-compactly-retractive union.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ChartCoverError(AscolimError):
    """A simplex image could not be covered by charts of the model."""
