"""
Training/validation splits and deterministic seed derivation.
"""

import zlib
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import List, Set, Tuple

import numpy as np

from ..errors import PreconditionError

_ENUMERATE_LIMIT = 1_000_000


@dataclass(frozen=True)
class Split:
    train_idx: Tuple[int, ...]
    valid_idx: Tuple[int, ...]

    @classmethod
    def from_train(cls, train: Tuple[int, ...], n: int) -> "Split":
        members = set(train)
        return cls(tuple(train), tuple(i for i in range(n) if i not in members))


def derive_seed(master: int, label: str) -> int:
    """A 32-bit seed for one pipeline stage, fixed by the master seed and the stage label."""
    sequence = np.random.SeedSequence([int(master) & 0xFFFFFFFF, zlib.crc32(label.encode("utf-8"))])
    return int(sequence.generate_state(1)[0])


def generate_splits(n: int, train_size: int, m: int, seed: int) -> List[Split]:
    """
    Draw ``m`` distinct training sets of ``train_size`` indices out of ``n``.

    Small split spaces are enumerated and sampled without replacement; large
    ones are sampled by rejection against the canonical (sorted) tuples drawn so far.

    Raises:
        PreconditionError: sizes out of range or m larger than C(n, train_size)
    """
    if not 2 <= train_size < n:
        raise PreconditionError(f"train_size must satisfy 2 <= train_size < n = {n}, got {train_size}")
    if m < 1:
        raise PreconditionError(f"Number of splits must be positive, got {m}")
    total = comb(n, train_size)
    if m > total:
        raise PreconditionError(
            f"Cannot draw {m} distinct splits: only C({n}, {train_size}) = {total} exist"
        )

    rng = np.random.default_rng(seed)
    if total <= min(4 * m, _ENUMERATE_LIMIT):
        every = list(combinations(range(n), train_size))
        chosen = [every[i] for i in rng.permutation(total)[:m]]
    else:
        seen: Set[Tuple[int, ...]] = set()
        chosen = []
        while len(chosen) < m:
            train = tuple(sorted(int(i) for i in rng.choice(n, size=train_size, replace=False)))
            if train not in seen:
                seen.add(train)
                chosen.append(train)
    return [Split.from_train(train, n) for train in chosen]
