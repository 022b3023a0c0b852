"""Voting selection over elaborated candidates.

Candidates are grouped by an equality oracle (default: byte-equality of
normalized statements; optionally a checker's Equal mode, which only
slightly extends reflexivity) and the winner is the first member of the
largest group.  With all-distinct candidates this degenerates to picking
the first valid completion.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class VoteGroup:
    members: tuple[int, ...]   # candidate indices in completion order
    key: str                   # canonical representative (first member's form)

    def __post_init__(self) -> None:
        if not self.members:
            raise SelectionError("vote group must be nonempty")
        if list(self.members) != sorted(self.members):
            raise SelectionError("group members must be ascending")


EqualityOracle = Callable[[str, str], bool]


def default_oracle(a: str, b: str) -> bool:
    return a == b


def group_candidates(
    normalized: Sequence[str], oracle: EqualityOracle | None = None
) -> list[VoteGroup]:
    """Partition candidates into oracle-equal groups, ordered by first member.

    Grouping is the transitive closure of pairwise oracle calls, so the
    result is independent of call completion order even for oracles that
    are not perfectly transitive.
    """
    if oracle is None:
        oracle = default_oracle
    n = len(normalized)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if find(i) != find(j) and oracle(normalized[i], normalized[j]):
                parent[find(j)] = find(i)

    members: dict[int, list[int]] = {}
    for i in range(n):
        members.setdefault(find(i), []).append(i)
    groups = [
        VoteGroup(members=tuple(sorted(idx)), key=normalized[min(idx)])
        for idx in members.values()
    ]
    groups.sort(key=lambda g: g.members[0])
    return groups


def select_best(groups: Sequence[VoteGroup]) -> int:
    """First member of the largest group; size ties go to the earliest group."""
    if not groups:
        raise SelectionError("cannot select from zero groups")
    best = min(groups, key=lambda g: (-len(g.members), g.members[0]))
    return best.members[0]
