"""Single-object replicated store driven by wheel quorums.

Copies live at physical sites.  An election swaps which site a logical ID
resolves to, so the copy seen at logical ID ``i`` is always the one stored at
``wheel.resolve(i)``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Hashable, Iterable, Iterator

from . import quorum
from .errors import DomainError
from .quorum import PermissionOracle, QuorumSet, Rng
from .topology import HUB, Wheel

INITIAL_PAYLOAD = None
SNAPSHOT_FORMAT = "wheelq-snapshot"
SNAPSHOT_VERSION = 1


@dataclass
class ReplicaCopy:
    site: Hashable
    value: Any = INITIAL_PAYLOAD
    version: int = 0
    up: bool = True
    granting: bool = True

    def install(self, value: Any, version: int) -> None:
        if version < self.version:
            raise ValueError(f"version would go backwards: {self.version} -> {version}")
        self.value = value
        self.version = version


@dataclass
class StoreState:
    wheel: Wheel
    fallback_reads: bool = False
    committed_version: int = 0
    sites: dict[Hashable, ReplicaCopy] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for i in range(self.wheel.n):
            site = self.wheel.resolve(i)
            self.sites.setdefault(site, ReplicaCopy(site))

    @property
    def copies(self) -> dict[int, ReplicaCopy]:
        """Logical ID -> copy under the current location binding."""
        return {i: self.sites[self.wheel.resolve(i)] for i in range(self.wheel.n)}

    def copy_at(self, i: int) -> ReplicaCopy:
        return self.sites[self.wheel.resolve(i)]

    def crash(self, site: Hashable) -> None:
        c = self._site(site)
        c.up = False
        c.granting = False

    def recover(self, site: Hashable) -> None:
        c = self._site(site)
        c.up = True
        c.granting = True

    def _site(self, site: Hashable) -> ReplicaCopy:
        try:
            return self.sites[site]
        except KeyError:
            raise DomainError(f"unknown site {site!r}") from None

    def snapshot(self) -> list[dict[str, Any]]:
        out = []
        for i, c in self.copies.items():
            rec = {"logical_id": i}
            rec.update(asdict(c))
            out.append(rec)
        return out


def new_store(wheel: Wheel, fallback_reads: bool = False) -> StoreState:
    return StoreState(wheel, fallback_reads=fallback_reads)


def oracle_for(s: StoreState) -> PermissionOracle:
    def get_permission(i: int) -> bool:
        c = s.copy_at(i)
        return c.up and c.granting

    def is_accessible(i: int) -> bool:
        return s.copy_at(i).up

    def version_of(i: int) -> int:
        return s.copy_at(i).version

    return PermissionOracle(get_permission, is_accessible, version_of)


def read_with_quorum(s: StoreState, rng: Rng) -> tuple[Any, int, QuorumSet]:
    oracle = oracle_for(s)
    if s.fallback_reads and not oracle.get_permission(HUB):
        q = quorum.read_quorum_fallback(s.wheel, oracle)
        src = max(q.members, key=lambda i: (s.copy_at(i).version, -i))
    else:
        q = quorum.read_quorum(s.wheel, oracle, rng)
        src = HUB
    c = s.copy_at(src)
    return c.value, c.version, q


def do_read(s: StoreState, rng: Rng) -> tuple[Any, int]:
    value, version, _ = read_with_quorum(s, rng)
    return value, version


def write_with_quorum(s: StoreState, payload: Any, rng: Rng, start: int = HUB) -> tuple[int, QuorumSet]:
    q = quorum.write_quorum(s.wheel, oracle_for(s), rng, start)
    version = q.version_basis + 1
    for i in q.members:
        s.copy_at(i).install(payload, version)
    s.committed_version = max(s.committed_version, version)
    return version, q


def do_write(s: StoreState, payload: Any, rng: Rng, start: int = HUB) -> int:
    """Install ``payload`` on a write quorum; raises QuorumUnavailable untouched on refusal."""
    return write_with_quorum(s, payload, rng, start)[0]


def dump_snapshot(s: StoreState, fp) -> None:
    fp.write(json.dumps({"format": SNAPSHOT_FORMAT, "version": SNAPSHOT_VERSION,
                         "n": s.wheel.n, "committed_version": s.committed_version}) + "\n")
    for rec in s.snapshot():
        fp.write(json.dumps(rec) + "\n")


def load_snapshot(lines: Iterable[str]) -> tuple[dict[str, Any], list[dict[str, Any]]]:
    it: Iterator[str] = iter(lines)
    header = json.loads(next(it))
    if header.get("format") != SNAPSHOT_FORMAT:
        raise ValueError("not a wheelq snapshot")
    return header, [json.loads(line) for line in it if line.strip()]
