"""Voting selection, pinned by transitive-closure and exhaustive-partition oracles."""
import itertools
import random

import pytest

from autoform.selection import SelectionError, VoteGroup, group_candidates, select_best


def closure_partition(items: list[str]) -> list[list[int]]:
    """Brute-force pairwise closure: reachability over the equality matrix."""
    n = len(items)
    adj = [[items[i] == items[j] for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                adj[i][j] = adj[i][j] or (adj[i][k] and adj[k][j])
    seen: set[int] = set()
    groups = []
    for i in range(n):
        if i in seen:
            continue
        members = [j for j in range(n) if adj[i][j]]
        seen.update(members)
        groups.append(members)
    return groups


def all_partitions(n: int):
    """Every set partition of range(n), groups ordered by first member."""
    if n == 0:
        yield []
        return
    for smaller in all_partitions(n - 1):
        for i in range(len(smaller)):
            yield smaller[:i] + [smaller[i] + [n - 1]] + smaller[i + 1 :]
        yield smaller + [[n - 1]]


def oracle_select(groups: list[list[int]]) -> int:
    best_size = -1
    best_first = None
    for g in groups:
        if len(g) > best_size or (len(g) == best_size and g[0] < best_first):
            best_size = len(g)
            best_first = g[0]
    return best_first


def test_identical_candidates_form_one_group():
    groups = group_candidates(["a", "a", "a"])
    assert len(groups) == 1
    assert groups[0].members == (0, 1, 2)
    assert groups[0].key == "a"


def test_distinct_candidates_form_singletons():
    groups = group_candidates(["a", "b", "c"])
    assert [g.members for g in groups] == [(0,), (1,), (2,)]


def test_groups_partition_input():
    rng = random.Random(0)
    for _ in range(50):
        items = [rng.choice("abc") for _ in range(rng.randrange(0, 7))]
        groups = group_candidates(items)
        covered = sorted(i for g in groups for i in g.members)
        assert covered == list(range(len(items)))


@pytest.mark.parametrize("trial", range(40))
def test_grouping_matches_pairwise_closure(trial):
    rng = random.Random(trial)
    items = [rng.choice("abcd") for _ in range(rng.randrange(1, 7))]
    groups = group_candidates(items)
    want = closure_partition(items)
    assert [list(g.members) for g in groups] == want


def test_grouping_with_custom_oracle():
    # oracle that equates strings of the same length
    groups = group_candidates(["aa", "bb", "c"], oracle=lambda x, y: len(x) == len(y))
    assert [g.members for g in groups] == [(0, 1), (2,)]


def test_group_default_oracle_is_byte_equality():
    groups = group_candidates(["x ", "x"])
    assert len(groups) == 2


def test_select_best_largest_group():
    groups = group_candidates(["a", "b", "b", "b", "c"])
    assert select_best(groups) == 1


def test_select_best_all_singletons_picks_first():
    groups = group_candidates(["a", "b", "c", "d"])
    assert select_best(groups) == 0


def test_select_best_tie_goes_to_earliest_first_member():
    groups = group_candidates(["a", "b", "a", "b"])   # two groups of two
    assert select_best(groups) == 0


def test_select_best_empty_rejected():
    with pytest.raises(SelectionError):
        select_best([])


def test_select_best_invariant_under_group_reordering():
    groups = group_candidates(["a", "b", "b", "c", "c", "c"])
    for perm in itertools.permutations(groups):
        assert select_best(list(perm)) == select_best(groups)


@pytest.mark.parametrize("n", range(1, 6))
def test_select_best_matches_oracle_over_all_partitions(n):
    for partition in all_partitions(n):
        ordered = sorted([sorted(g) for g in partition], key=lambda g: g[0])
        groups = [VoteGroup(members=tuple(g), key=f"g{g[0]}") for g in ordered]
        assert select_best(groups) == oracle_select(ordered)


def test_vote_group_invariants():
    with pytest.raises(SelectionError):
        VoteGroup(members=(), key="x")
    with pytest.raises(SelectionError):
        VoteGroup(members=(2, 1), key="x")
