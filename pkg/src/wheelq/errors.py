"""Exception hierarchy shared across the package."""


class WheelError(Exception):
    """Base class for every error raised by wheelq."""


class TopologyError(WheelError, ValueError):
    """A wheel could not be built from the given parameters."""


class DomainError(WheelError, ValueError):
    """A logical ID was outside the range an operation accepts."""


class QuorumUnavailable(WheelError):
    """Not enough copies granted permission to form the requested quorum."""


class ElectionFailed(QuorumUnavailable):
    """No accessible pair of adjacent cycle nodes could be found."""


class ScenarioError(WheelError, ValueError):
    """A scenario or trace document is malformed."""
