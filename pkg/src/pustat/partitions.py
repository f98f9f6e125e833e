"""Enumeration of connected even partitions of four variable groups.

The variables come in four groups with sizes (i, i, j, j), written g:s for
group g in 1..4 and slot s.  We enumerate the set partitions of all
2i + 2j variables such that

  * no block contains two variables from the same group,
  * every block has at least two variables,
  * no proper bipartition of the four groups separates the blocks: there is
    no split {A1, A2} of {1,2,3,4} with every block drawn entirely from A1
    or entirely from A2.

These partitions index the contracted-product integrals of the bound terms:
each block becomes one integration variable shared by its members.

Enumeration walks restricted-growth strings over the canonical variable
order (groups ascending, slots ascending), pruning same-group collisions as
labels are assigned; block sizes and connectivity are checked on completed
strings.  The output order is the lexicographic order of the growth strings
and is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Tuple

__all__ = [
    "PartitionVariable",
    "Partition",
    "variables",
    "enumerate_partitions",
    "count_partitions",
    "is_valid",
    "MAX_GROUP_SIZE",
]

MAX_GROUP_SIZE = 4

# one representative per unordered proper bipartition of {1,2,3,4}: the side
# containing group 1, as a bitmask over groups 1..4 -> bits 0..3
_SEPARATORS = tuple(a for a in range(1, 15) if a & 1)


@dataclass(frozen=True, order=True)
class PartitionVariable:
    """One tensor-product variable: group in 1..4, slot within its group."""

    group: int
    slot: int

    def __str__(self) -> str:
        return f"{self.group}:{self.slot}"


@dataclass(frozen=True)
class Partition:
    """Disjoint blocks of variables covering all 2i + 2j of them."""

    blocks: Tuple[Tuple[PartitionVariable, ...], ...]

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def labels(self) -> Dict[PartitionVariable, int]:
        """Variable -> block index map."""
        return {v: b for b, block in enumerate(self.blocks) for v in block}

    def __str__(self) -> str:
        return " ".join("{" + ", ".join(str(v) for v in block) + "}" for block in self.blocks)


def variables(i: int, j: int) -> Tuple[PartitionVariable, ...]:
    """Canonical variable order: groups ascending, slots ascending."""
    sizes = (i, i, j, j)
    return tuple(
        PartitionVariable(g, s)
        for g, size in zip((1, 2, 3, 4), sizes)
        for s in range(1, size + 1)
    )


def _check_sizes(i: int, j: int):
    if not (1 <= i <= MAX_GROUP_SIZE and 1 <= j <= MAX_GROUP_SIZE):
        raise ValueError(f"group sizes must lie in 1..{MAX_GROUP_SIZE}, got ({i}, {j})")


def _connected(masks) -> bool:
    """No proper group bipartition splits the blocks."""
    for sep in _SEPARATORS:
        if all((m & sep) == m or (m & sep) == 0 for m in masks):
            return False
    return True


@lru_cache(maxsize=None)
def enumerate_partitions(i: int, j: int) -> Tuple[Partition, ...]:
    """All valid partitions for group sizes (i, i, j, j), in canonical order."""
    _check_sizes(i, j)
    vars_ = variables(i, j)
    group_bits = tuple(1 << (v.group - 1) for v in vars_)
    n = len(vars_)
    out = []
    assign = [0] * n
    masks: list = []
    sizes: list = []

    def _emit():
        blocks = [[] for _ in masks]
        for v, b in zip(vars_, assign):
            blocks[b].append(v)
        out.append(Partition(tuple(tuple(b) for b in blocks)))

    def _rec(v: int):
        if v == n:
            if min(sizes) >= 2 and _connected(masks):
                _emit()
            return
        # every remaining variable can close at most one singleton block
        if sum(1 for s in sizes if s == 1) > n - v:
            return
        g = group_bits[v]
        for b in range(len(masks)):
            if masks[b] & g:
                continue
            masks[b] |= g
            sizes[b] += 1
            assign[v] = b
            _rec(v + 1)
            masks[b] ^= g
            sizes[b] -= 1
        masks.append(g)
        sizes.append(1)
        assign[v] = len(masks) - 1
        _rec(v + 1)
        masks.pop()
        sizes.pop()

    _rec(0)
    return tuple(out)


def count_partitions(i: int, j: int) -> int:
    return len(enumerate_partitions(i, j))


def is_valid(partition: Partition, i: int, j: int) -> bool:
    """Check the three defining constraints; raise on a malformed partition."""
    _check_sizes(i, j)
    expected = set(variables(i, j))
    seen: set = set()
    for block in partition.blocks:
        if not block:
            raise ValueError("empty block")
        for v in block:
            if v in seen:
                raise ValueError(f"variable {v} appears in two blocks")
            seen.add(v)
    if seen != expected:
        raise ValueError("blocks do not cover the variable set exactly")

    masks = []
    for block in partition.blocks:
        if len(block) < 2:
            return False
        mask = 0
        for v in block:
            bit = 1 << (v.group - 1)
            if mask & bit:
                return False
            mask |= bit
        masks.append(mask)
    return _connected(masks)
