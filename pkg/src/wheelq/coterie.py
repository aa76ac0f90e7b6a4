"""Offline checks on the quorum family a wheel produces.

Everything here works on plain families of frozensets so hand-built
counterexamples can be fed through the same checks as enumerated ones.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import DomainError
from .quorum import write_quorum_size
from .topology import HUB, MIN_NODES, build_wheel

Family = frozenset  # frozenset[frozenset[int]]

_CHUNK = 1 << 16
# candidates beyond this make analyze() skip the vote search (~1 minute of numpy)
VOTE_SEARCH_LIMIT = 20_000_000


def _family(quorums: Iterable[Iterable[int]]) -> frozenset:
    return frozenset(frozenset(q) for q in quorums)


def enumerate_write_quorums(n: int) -> frozenset:
    """Every write quorum the fault-free wheel can hand out, deduplicated."""
    if n < MIN_NODES:
        raise DomainError(f"n must be >= {MIN_NODES}, got {n}")
    w = build_wheel(n)
    out = set()
    for start in w.cycle:
        walk, i = [], start
        for _ in range(n // 2):
            walk.append(i)
            i = w.suc(w.suc(i))
        out.add(frozenset([HUB, *walk]))
    return frozenset(out)


def read_quorums(n: int) -> frozenset:
    if n < MIN_NODES:
        raise DomainError(f"n must be >= {MIN_NODES}, got {n}")
    return _family([[HUB]])


def verify_coterie(quorums: Iterable[Iterable[int]]) -> tuple[bool, bool]:
    """Return (minimality_ok, intersection_ok) for a quorum family."""
    fam = [frozenset(q) for q in quorums]
    if not fam or any(not q for q in fam):
        raise DomainError("a coterie needs at least one non-empty quorum")
    minimal = not any(a < b for a in fam for b in fam)
    intersecting = all(a & b for a, b in itertools.combinations(fam, 2))
    return minimal, intersecting


def adjacent_pairs(n: int) -> list[frozenset]:
    w = build_wheel(n)
    return [frozenset((i, w.suc(i))) for i in w.cycle]


def verify_theorems(n: int, write_quorums=None, read_quorums_=None) -> tuple[bool, bool, bool]:
    """Exhaustive read/write, write/write and adjacent-pair coverage checks.

    The families default to the enumerated ones; pass others to probe the
    checks with counterexamples.
    """
    wq = list(enumerate_write_quorums(n) if write_quorums is None else _family(write_quorums))
    rq = list(read_quorums(n) if read_quorums_ is None else _family(read_quorums_))
    rw_ok = all(r & q for r in rq for q in wq)
    ww_ok = all(a & b for a, b in itertools.combinations_with_replacement(wq, 2))
    pairs = adjacent_pairs(n)
    cover_ok = all(p & (q - {HUB}) for p in pairs for q in wq)
    return rw_ok, ww_ok, cover_ok


@dataclass(frozen=True)
class VoteAssignment:
    votes: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.votes)

    def is_quorum(self, s: Iterable[int]) -> bool:
        return 2 * sum(self.votes[i] for i in s) > self.total

    def minimal_quorums(self) -> frozenset:
        n = len(self.votes)
        out = set()
        for mask in range(1 << n):
            s = [i for i in range(n) if mask >> i & 1]
            if self.is_quorum(s) and not any(self.is_quorum([j for j in s if j != i]) for i in s):
                out.add(frozenset(s))
        return frozenset(out)


def _subset_matrix(n: int) -> np.ndarray:
    masks = np.arange(1 << n)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(np.int64)


def vote_equivalence_search(quorums: Iterable[Iterable[int]], n: int, max_vote: int) -> VoteAssignment | None:
    """Search votes in 0..max_vote per node for one whose minimal strict-majority
    sets are exactly ``quorums``.

    Candidates are visited in lexicographic order of (v_0, ..., v_{n-1}) and
    the first witness is returned.  ``None`` only means "none within the
    bound".
    """
    if max_vote < 1:
        raise DomainError("max_vote must be >= 1")
    fam = _family(quorums)
    if any(i < 0 or i >= n for q in fam for i in q):
        raise DomainError(f"quorum members must lie in 0..{n - 1}")
    if fam and not verify_coterie(fam)[0]:
        return None  # minimal families are antichains
    subsets = _subset_matrix(n)                     # (2^n, n)
    masks = np.arange(1 << n)
    # strict-majority winning sets are upward closed, so the minimal ones equal
    # an antichain exactly when the winning sets equal its up-closure
    target = np.zeros(1 << n, dtype=bool)
    for q in fam:
        qmask = sum(1 << i for i in q)
        target |= (masks & qmask) == qmask

    base = max_vote + 1
    weights = base ** np.arange(n - 1, -1, -1, dtype=np.int64)
    total_count = base ** n
    for lo in range(0, total_count, _CHUNK):
        idx = np.arange(lo, min(lo + _CHUNK, total_count), dtype=np.int64)
        votes = (idx[:, None] // weights[None, :]) % base          # (k, n)
        winning = 2 * (votes @ subsets.T) > votes.sum(axis=1, keepdims=True)
        hits = np.flatnonzero((winning == target[None, :]).all(axis=1))
        if hits.size:
            return VoteAssignment(tuple(int(v) for v in votes[hits[0]]))
    return None


def strict_system_feasible(greater: Sequence[Iterable[int]], less: Sequence[Iterable[int]], n: int) -> bool:
    """Can non-negative real votes put every ``greater`` set strictly above half
    the total and every ``less`` set strictly below it?

    Homogeneous, so we maximise a common slack t with votes in [0, 1]; the
    system is feasible iff the optimum slack is positive.
    """
    rows = []
    for s, sign in [(g, 1) for g in greater] + [(l, -1) for l in less]:
        # sign * (2*sum_S v - sum_all v) >= t  ->  -sign*(2*1_S - 1) . v + t <= 0
        coeff = np.full(n, -1.0)
        for i in s:
            coeff[i] += 2.0
        rows.append(np.append(-sign * coeff, 1.0))
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.array(rows), b_ub=np.zeros(len(rows)),
                  bounds=[(0, 1)] * n + [(None, 1)], method="highs")
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    return -res.fun > 1e-9


def rotate(quorums: Iterable[Iterable[int]], n: int, k: int) -> frozenset:
    """Relabel cycle node i as the node k steps further round the cycle."""
    m = n - 1
    return _family([[i if i == HUB else (i - 1 + k) % m + 1 for i in q] for q in quorums])


@dataclass
class CoterieReport:
    n: int
    write_quorums: list[list[int]]
    read_quorums: list[list[int]]
    minimality_ok: bool
    rw_intersection_ok: bool
    ww_intersection_ok: bool
    adjacent_cover_ok: bool
    vote_equivalent: list[int] | None
    search_bound: int
    vote_search_done: bool = True
    sizes_ok: bool = True
    format: str = field(default="wheelq-coterie-report", init=False)
    version: int = field(default=1, init=False)

    @property
    def all_ok(self) -> bool:
        return (self.minimality_ok and self.rw_intersection_ok and self.ww_intersection_ok
                and self.adjacent_cover_ok and self.sizes_ok and self.vote_equivalent is None)

    def to_dict(self) -> dict:
        d = asdict(self)
        return {"format": d.pop("format"), "version": d.pop("version"), **d}


def _sorted_family(fam) -> list[list[int]]:
    return sorted(sorted(q) for q in fam)


def analyze(n: int, max_vote: int | None = None, search_limit: int = VOTE_SEARCH_LIMIT) -> CoterieReport:
    if max_vote is None:
        max_vote = n
    wq = enumerate_write_quorums(n)
    minimal, intersecting = verify_coterie(wq)
    rw, ww, cover = verify_theorems(n)
    searched = (max_vote + 1) ** n <= search_limit
    witness = vote_equivalence_search(wq, n, max_vote) if searched else None
    return CoterieReport(
        n=n,
        write_quorums=_sorted_family(wq),
        read_quorums=_sorted_family(read_quorums(n)),
        minimality_ok=minimal,
        rw_intersection_ok=rw,
        ww_intersection_ok=ww and intersecting,
        adjacent_cover_ok=cover,
        vote_equivalent=None if witness is None else list(witness.votes),
        search_bound=max_vote,
        vote_search_done=searched,
        sizes_ok=all(len(q) == write_quorum_size(n) for q in wq),
    )
