"""Logical wheel structure: a HUB (logical ID 0) joined to a cycle of spokes.

Logical IDs never move.  Elections only permute which physical site a
logical ID resolves to, so every node keeps finding the HUB at ID 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable, Mapping, Sequence

from .errors import DomainError, TopologyError

HUB = 0
MIN_NODES = 4


@dataclass(frozen=True)
class NodeRecord:
    id: int
    node_location: Hashable
    suc: int | None
    pred: int | None
    hub: int = HUB


class Wheel:
    """HUB plus an (n-1)-cycle with a mutable logical ID -> site binding."""

    def __init__(self, n: int, sites: Sequence[Hashable], suc: Sequence[int] | None = None):
        if n < MIN_NODES:
            raise TopologyError(f"a wheel needs at least {MIN_NODES} nodes, got {n}")
        if len(sites) != n:
            raise TopologyError(f"expected {n} sites, got {len(sites)}")
        if len(set(sites)) != n:
            raise TopologyError("site tokens must be distinct")
        self.n = n
        self._sites = list(sites)
        if suc is None:
            self._suc = [None] + [i + 1 for i in range(1, n - 1)] + [1]
        else:
            self._suc = _validated_cycle(n, suc)
        self._pred: list[int | None] = [None] * n
        for i in range(1, n):
            self._pred[self._suc[i]] = i

    @property
    def nodes(self) -> list[NodeRecord]:
        return [NodeRecord(i, self._sites[i], self._suc[i], self._pred[i]) for i in range(self.n)]

    @property
    def location_map(self) -> dict[int, Hashable]:
        return dict(enumerate(self._sites))

    @property
    def cycle(self) -> range:
        return range(1, self.n)

    def suc(self, i: int) -> int:
        self._check_cycle_id(i)
        return self._suc[i]

    def pred(self, i: int) -> int:
        self._check_cycle_id(i)
        return self._pred[i]

    def resolve(self, i: int) -> Hashable:
        self._check_id(i)
        return self._sites[i]

    def logical_id_of(self, site: Hashable) -> int:
        try:
            return self._sites.index(site)
        except ValueError:
            raise DomainError(f"unknown site {site!r}") from None

    def swap_locations(self, a: int, b: int) -> Wheel:
        """Exchange the physical sites bound to ``a`` and ``b`` in place."""
        self._check_id(a)
        self._check_id(b)
        self._sites[a], self._sites[b] = self._sites[b], self._sites[a]
        return self

    def copy(self) -> Wheel:
        return Wheel(self.n, list(self._sites), list(self._suc))

    def to_config(self) -> dict[str, Any]:
        return {"n": self.n, "sites": list(self._sites), "suc": list(self._suc)}

    @classmethod
    def from_config(cls, cfg: Mapping[str, Any]) -> Wheel:
        try:
            n = int(cfg["n"])
        except (KeyError, TypeError, ValueError):
            raise TopologyError("topology config needs an integer 'n'") from None
        sites = cfg.get("sites")
        if sites is None:
            sites = default_sites(n)
        return cls(n, list(sites), cfg.get("suc"))

    def _check_id(self, i: int) -> None:
        if not (isinstance(i, int) and 0 <= i < self.n):
            raise DomainError(f"logical ID {i!r} outside 0..{self.n - 1}")

    def _check_cycle_id(self, i: int) -> None:
        if not (isinstance(i, int) and 1 <= i < self.n):
            raise DomainError(f"logical ID {i!r} is not a cycle node (1..{self.n - 1})")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Wheel):
            return NotImplemented
        return self._sites == other._sites and self._suc == other._suc

    def __repr__(self) -> str:
        return f"Wheel(n={self.n}, sites={self._sites!r})"


def _validated_cycle(n: int, suc: Sequence[Any]) -> list:
    """Check an explicit successor table describes one cycle over 1..n-1.

    Index 0 (the HUB) is ignored and stored as None.
    """
    if len(suc) != n:
        raise TopologyError(f"suc table must have {n} entries (index 0 is ignored)")
    table: list = [None]
    for i in range(1, n):
        s = suc[i]
        if not (isinstance(s, int) and 1 <= s < n):
            raise TopologyError(f"suc[{i}]={s!r} is not a cycle node")
        table.append(s)
    seen = {1}
    cur = table[1]
    while cur != 1:
        if cur in seen:
            raise TopologyError("suc table does not form a single cycle")
        seen.add(cur)
        cur = table[cur]
    if len(seen) != n - 1:
        raise TopologyError("suc table does not visit every cycle node")
    return table


def default_sites(n: int) -> list[str]:
    return [f"s{i}" for i in range(n)]


def build_wheel(n: int, sites: Sequence[Hashable] | None = None) -> Wheel:
    """Make ``sites[0]`` the HUB and wire the rest into a cycle in ID order."""
    if sites is None:
        sites = default_sites(n)
    return Wheel(n, sites)
