"""Wheel quorum replica control: quorum construction, a fail-stop simulator,
and offline coterie checks."""

from .errors import (DomainError, ElectionFailed, QuorumUnavailable, ScenarioError,
                     TopologyError, WheelError)
from .quorum import (PermissionOracle, QuorumSet, Rng, check, election_quorum, read_quorum,
                     read_quorum_fallback, write_quorum, write_quorum_size)
from .topology import HUB, NodeRecord, Wheel, build_wheel

__all__ = [
    "HUB", "NodeRecord", "Wheel", "build_wheel",
    "PermissionOracle", "QuorumSet", "Rng", "check", "election_quorum", "read_quorum",
    "read_quorum_fallback", "write_quorum", "write_quorum_size",
    "DomainError", "ElectionFailed", "QuorumUnavailable", "ScenarioError", "TopologyError",
    "WheelError",
]
