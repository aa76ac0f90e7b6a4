import itertools

import pytest
from hypothesis import given, settings, strategies as st

from wheelq import coterie as c
from wheelq.errors import DomainError

PAPER_N6 = [{0, 1, 3, 5}, {0, 1, 2, 4}, {0, 3, 5, 2}, {0, 4, 1, 3}, {0, 5, 2, 4}]


def fam(*sets):
    return frozenset(frozenset(s) for s in sets)


def slow_vote_search(quorums, n, max_vote):
    """Independent oracle: itertools over votes, pure-python minimal sets."""
    target = fam(*quorums)
    for votes in itertools.product(range(max_vote + 1), repeat=n):
        if c.VoteAssignment(votes).minimal_quorums() == target:
            return votes
    return None


def test_n6_matches_listed_family():
    assert c.enumerate_write_quorums(6) == fam(*PAPER_N6)


def test_n4_all_pairs_with_hub():
    expected = fam(*({0, *p} for p in itertools.combinations([1, 2, 3], 2)))
    assert c.enumerate_write_quorums(4) == expected


@pytest.mark.parametrize("n", range(4, 17))
def test_sizes_and_hub(n):
    for q in c.enumerate_write_quorums(n):
        assert 0 in q and len(q) == -(-(n - 1) // 2) + 1
    assert c.read_quorums(n) == fam({0})


def test_small_n_rejected():
    with pytest.raises(DomainError):
        c.enumerate_write_quorums(3)


def test_verify_coterie_examples():
    assert c.verify_coterie(c.enumerate_write_quorums(6)) == (True, True)
    assert c.verify_coterie([{1, 2}, {1}]) == (False, True)
    assert c.verify_coterie([{1}, {2}]) == (True, False)
    with pytest.raises(DomainError):
        c.verify_coterie([])
    with pytest.raises(DomainError):
        c.verify_coterie([set()])


@pytest.mark.parametrize("n", range(4, 17))
def test_theorems_hold(n):
    assert c.verify_theorems(n) == (True, True, True)
    assert c.verify_coterie(c.enumerate_write_quorums(n)) == (True, True)


def test_theorem_checks_catch_counterexamples():
    wq = [set(q) for q in c.enumerate_write_quorums(6)]
    wq[0].discard(0)
    rw, ww, _ = c.verify_theorems(6, write_quorums=wq)
    assert rw is False
    # two disjoint write sets
    assert c.verify_theorems(6, write_quorums=[{1, 2}, {3, 4}])[1] is False
    # a quorum missing both 1 and 2 misses the adjacent pair (1,2)
    assert c.verify_theorems(6, write_quorums=[{0, 3, 4, 5}])[2] is False


def test_n6_has_no_vote_equivalent():
    assert c.vote_equivalence_search(c.enumerate_write_quorums(6), 6, 6) is None


def test_positive_controls():
    maj = c.vote_equivalence_search([{1, 2}, {1, 3}, {2, 3}], 4, 3)
    assert maj.votes == (0, 1, 1, 1)
    assert c.vote_equivalence_search([{0, 1}, {0, 2}, {1, 2}], 3, 3).votes == (1, 1, 1)
    assert c.vote_equivalence_search([{0}], 6, 6).votes == (1, 0, 0, 0, 0, 0)


def test_non_antichain_has_no_witness():
    assert c.vote_equivalence_search([{0}, {0, 1}], 3, 3) is None


def test_search_validates_input():
    with pytest.raises(DomainError):
        c.vote_equivalence_search([{0}], 3, 0)
    with pytest.raises(DomainError):
        c.vote_equivalence_search([{5}], 3, 2)


families = st.integers(3, 4).flatmap(lambda n: st.tuples(
    st.just(n),
    st.sets(st.frozensets(st.integers(0, n - 1), min_size=1), min_size=1, max_size=4),
))


@settings(max_examples=60, deadline=None)
@given(families, st.integers(1, 3))
def test_search_agrees_with_slow_oracle(case, bound):
    n, quorums = case
    fast = c.vote_equivalence_search(quorums, n, bound)
    slow = slow_vote_search(quorums, n, bound)
    assert (None if fast is None else fast.votes) == slow


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 5).flatmap(lambda n: st.tuples(
    st.just(n),
    st.sets(st.frozensets(st.integers(0, n - 1), min_size=1), min_size=1, max_size=3),
    st.integers(0, n - 2),
)))
def test_search_is_rotation_symmetric(case):
    n, quorums, k = case
    w = c.vote_equivalence_search(quorums, n, 3)
    rotated = c.rotate(quorums, n, k)
    w_rot = c.vote_equivalence_search(rotated, n, 3)
    assert (w is None) == (w_rot is None)
    if w is not None:
        # move each vote along with its node
        moved = [0] * n
        for i, v in enumerate(w.votes):
            j = i if i == 0 else (i - 1 + k) % (n - 1) + 1
            moved[j] = v
        assert c.VoteAssignment(tuple(moved)).minimal_quorums() == rotated


def test_wheel_family_rotation_invariant():
    for n in range(4, 12):
        wq = c.enumerate_write_quorums(n)
        for k in range(n - 1):
            assert c.rotate(wq, n, k) == wq


PROOF_GT = [{0, 1, 3, 4}, {0, 2, 4, 5}]
PROOF_LT = [{0, 2, 3, 4}, {0, 1, 4, 5}]


def test_proof_sets_status():
    wq = c.enumerate_write_quorums(6)
    assert all(frozenset(s) in wq for s in PROOF_GT)
    # the "not eligible" sets contain no write quorum at all
    assert not any(q <= s for s in map(frozenset, PROOF_LT) for q in wq)


def test_proof_inequalities_infeasible():
    assert c.strict_system_feasible(PROOF_GT, PROOF_LT, 6) is False
    # each half on its own is satisfiable
    assert c.strict_system_feasible(PROOF_GT[:1], PROOF_LT[:1], 6) is True
    assert c.strict_system_feasible(PROOF_GT[1:], PROOF_LT[1:], 6) is True


def test_proof_inequalities_integer_brute_force():
    def ok(v):
        total = sum(v)
        return (all(2 * sum(v[i] for i in s) > total for s in PROOF_GT)
                and all(2 * sum(v[i] for i in s) < total for s in PROOF_LT))

    assert not any(ok(v) for v in itertools.product(range(7), repeat=6))


def test_analyze_report():
    r = c.analyze(6)
    assert r.write_quorums == sorted(sorted(q) for q in PAPER_N6)
    assert r.read_quorums == [[0]]
    assert r.all_ok and r.vote_equivalent is None and r.search_bound == 6
    d = r.to_dict()
    assert list(d)[:2] == ["format", "version"]


def test_analyze_skips_oversized_search():
    r = c.analyze(12)
    assert not r.vote_search_done and r.all_ok
