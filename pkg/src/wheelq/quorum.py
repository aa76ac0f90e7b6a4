"""Read, write and election quorum construction over a wheel.

The engine never talks to copies directly.  It asks a ``PermissionOracle``
whether a logical ID grants access, is reachable, and what version it holds.
The only side effect is the location swap performed by an election.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Callable

from .errors import DomainError, ElectionFailed, QuorumUnavailable
from .topology import HUB, Wheel

log = logging.getLogger(__name__)

READ = "read"
WRITE = "write"
ELECTION = "election"


@dataclass
class PermissionOracle:
    get_permission: Callable[[int], bool]
    is_accessible: Callable[[int], bool]
    version_of: Callable[[int], int]


@dataclass(frozen=True)
class QuorumSet:
    kind: str
    members: tuple[int, ...]
    version_basis: int | None = None

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, i: object) -> bool:
        return i in self.members

    def as_set(self) -> frozenset[int]:
        return frozenset(self.members)


@dataclass
class Rng:
    """Seeded draw source; one instance is threaded through a whole run."""

    seed: int | str = 0
    _random: random.Random = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._random = random.Random(self.seed)

    def next_in_range(self, k: int) -> int:
        """Uniform integer in 1..k."""
        if k < 1:
            raise ValueError(f"empty range 1..{k}")
        return self._random.randint(1, k)

    def random(self) -> float:
        return self._random.random()

    def choice(self, seq):
        return self._random.choice(seq)


def _random_cycle_node(w: Wheel, rng: Rng) -> int:
    return rng.next_in_range(w.n - 1)


def check(w: Wheel, oracle: PermissionOracle, i: int) -> list[int]:
    """Collect floor(n/2) alternating cycle nodes starting at ``i``.

    Returns an empty list as soon as any of them refuses permission.
    """
    if i == HUB:
        raise DomainError("check() walks the cycle; the HUB is not a start node")
    w.suc(i)  # domain check
    needed = w.n // 2
    quorum_list: list[int] = []
    while len(quorum_list) < needed:
        if not oracle.get_permission(i):
            quorum_list.clear()
            return quorum_list
        quorum_list.append(i)
        i = w.suc(w.suc(i))
    return quorum_list


def election_quorum(w: Wheel, oracle: PermissionOracle, i: int, rng: Rng | None = None) -> int:
    """Elect a new HUB from the first accessible adjacent pair found from ``i``.

    The fresher copy of the pair (lower ID on a version tie) swaps physical
    locations with the HUB.  Returns that node's logical ID; its former site
    is now ``w.resolve(0)``.
    """
    if i == HUB:
        if rng is None:
            raise DomainError("a random start needs an Rng")
        i = _random_cycle_node(w, rng)
    current = i
    w.suc(current)
    nodes_done = 0
    while nodes_done < w.n:
        if oracle.is_accessible(current):
            nxt = w.suc(current)
            if oracle.is_accessible(nxt):
                a, b = sorted((current, nxt))
                latest = b if oracle.version_of(b) > oracle.version_of(a) else a
                log.debug("election: pair (%d,%d) -> %d moves to HUB", current, nxt, latest)
                w.swap_locations(HUB, latest)
                return latest
            current = w.suc(nxt)
            nodes_done += 2
        else:
            current = w.suc(current)
            nodes_done += 1
    raise ElectionFailed(f"no accessible adjacent pair after {nodes_done} steps from node {i}")


def read_quorum(w: Wheel | None, oracle: PermissionOracle, rng: Rng) -> QuorumSet | None:
    """Return ``{0}``, electing a new HUB first if the current one refuses."""
    if w is None:
        return None
    if not oracle.get_permission(HUB):
        election_quorum(w, oracle, _random_cycle_node(w, rng), rng)
        if not oracle.get_permission(HUB):
            raise QuorumUnavailable("newly elected HUB refused the read")
    return QuorumSet(READ, (HUB,), oracle.version_of(HUB))


def read_quorum_fallback(w: Wheel, oracle: PermissionOracle) -> QuorumSet:
    """Read from the first adjacent cycle pair (scanning from ID 1) that grants access.

    The caller must treat the higher-version member as authoritative.
    """
    for i in w.cycle:
        j = w.suc(i)
        if oracle.get_permission(i) and oracle.get_permission(j):
            basis = max(oracle.version_of(i), oracle.version_of(j))
            return QuorumSet(READ, (i, j), basis)
    raise QuorumUnavailable("no adjacent cycle pair grants access")


def write_quorum(w: Wheel, oracle: PermissionOracle, rng: Rng, start: int) -> QuorumSet:
    """HUB plus the first fully granted alternating walk, trying starts along the cycle."""
    w.resolve(start)
    if not oracle.get_permission(HUB):
        election_quorum(w, oracle, _random_cycle_node(w, rng), rng)
        if not oracle.get_permission(HUB):
            raise QuorumUnavailable("newly elected HUB refused the write")
    current = start
    if current == HUB:
        current = _random_cycle_node(w, rng)
    quorum_list: list[int] = []
    nodes_covered = 0
    while not quorum_list and nodes_covered < w.n:
        quorum_list = check(w, oracle, current)
        current = w.suc(current)
        nodes_covered += 1
    if not quorum_list:
        raise QuorumUnavailable(f"no alternating walk fully granted after {nodes_covered} starts")
    members = (HUB, *quorum_list)
    return QuorumSet(WRITE, members, max(oracle.version_of(i) for i in members))


def write_quorum_size(n: int) -> int:
    return -(-(n - 1) // 2) + 1
