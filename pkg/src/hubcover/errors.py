"""Exception hierarchy shared by every hubcover module."""

from __future__ import annotations


class HubCoverError(Exception):
    """Base class for all hubcover errors."""


class InstanceError(HubCoverError, ValueError):
    """An instance (or a raw field of one) violates a structural invariant."""


class NonMetricError(InstanceError):
    pass


class NonPositiveCostError(InstanceError):
    pass


class GeometryVariantMismatchError(InstanceError):
    pass


class UncoveredBranchSAError(InstanceError):
    pass


class BadCapacityError(InstanceError):
    pass


class InvalidBoardError(InstanceError):
    pass


class WrongVariantError(HubCoverError, ValueError):
    pass


class WitnessMismatchError(HubCoverError, ValueError):
    """The witness kind does not fit the instance's allocation/variant."""


class LimitExceededError(HubCoverError):
    """Instance is larger than the configured desk-scale limits."""


class InfeasibleError(HubCoverError):
    pass


class WrongSettingError(HubCoverError, ValueError):
    """An algorithm was asked to run in a setting it deliberately refuses."""


class UncoverableElementError(InfeasibleError):
    pass


class UnliftableWitnessError(HubCoverError):
    """A target solution has no preimage in the source problem."""


class FormatError(HubCoverError, ValueError):
    """Base class for text-format errors; ``line`` is 1-based or None."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


class FormatSyntaxError(FormatError):
    pass


class FormatSemanticError(FormatError):
    pass


class BadSpecError(HubCoverError, ValueError):
    """Generator parameters are invalid."""
