import itertools
import logging
import random
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from mvnets.cellular.neighborhood import Neighborhood, StateSet, elementary_neighborhood, moore_neighborhood
from mvnets.errors import DomainError, PreconditionError, ShapeError

logger = logging.getLogger(__name__)


def encode_tuple(xs: Sequence[int], k: int) -> int:
    """Base-k index of an input tuple, first position most significant."""
    idx = 0
    for x in xs:
        idx = idx * k + int(x)
    return idx


def decode_index(idx: int, k: int, n: int) -> Tuple[int, ...]:
    digits = []
    for _ in range(n):
        idx, r = divmod(idx, k)
        digits.append(r)
    return tuple(reversed(digits))


class TransitionTable:
    """
    Dense map K^n -> K over state indices.

    entries[i] is the output for the tuple whose base-k encoding is i.
    """

    def __init__(self, k: int, n: int, entries: Sequence[int], neighborhood: Optional[Neighborhood] = None):
        StateSet(k)
        if n < 1:
            raise PreconditionError(f"table arity must be >= 1, got {n}")
        arr = np.array(entries, dtype=np.int64).reshape(-1)
        if arr.size != k ** n:
            raise ShapeError(f"table for k={k}, n={n} needs {k ** n} entries, got {arr.size}")
        if arr.size and (arr.min() < 0 or arr.max() >= k):
            raise DomainError(f"table entries must lie in 0..{k - 1}")
        if neighborhood is not None and neighborhood.n != n:
            raise ShapeError(f"neighborhood has {neighborhood.n} offsets but table arity is {n}")
        self.k = k
        self.n = n
        self.entries = arr
        self.entries.setflags(write=False)
        self.neighborhood = neighborhood

    @property
    def states(self) -> StateSet:
        return StateSet(self.k)

    def lookup(self, xs: Sequence[int]) -> int:
        if len(xs) != self.n:
            raise ShapeError(f"expected {self.n} inputs, got {len(xs)}")
        return int(self.entries[encode_tuple(xs, self.k)])

    def inputs(self) -> Iterator[Tuple[int, ...]]:
        """All input tuples in ascending base-k order."""
        return itertools.product(range(self.k), repeat=self.n)

    def items(self) -> Iterator[Tuple[Tuple[int, ...], int]]:
        for idx, xs in enumerate(self.inputs()):
            yield xs, int(self.entries[idx])

    def with_neighborhood(self, neighborhood: Neighborhood) -> "TransitionTable":
        return TransitionTable(self.k, self.n, self.entries, neighborhood)

    def __eq__(self, other):
        if not isinstance(other, TransitionTable):
            return NotImplemented
        return self.k == other.k and self.n == other.n and np.array_equal(self.entries, other.entries)

    def __repr__(self):
        return f"TransitionTable(k={self.k}, n={self.n}, entries={self.entries.tolist()})"


# === 1. Named tables ===
def elementary_table(index: int) -> TransitionTable:
    """Wolfram rule `index`: bit b gives the output for the pattern x[-1]x[0]x[1] = b."""
    if not 0 <= index <= 255:
        raise DomainError(f"elementary rule index must be in 0..255, got {index}")
    entries = [(index >> b) & 1 for b in range(8)]
    return TransitionTable(2, 3, entries, elementary_neighborhood())


def game_of_life_table() -> TransitionTable:
    entries = []
    for xs in itertools.product((0, 1), repeat=9):
        center, alive = xs[0], sum(xs[1:])
        entries.append(int(alive == 3 or (center == 1 and alive == 2)))
    return TransitionTable(2, 9, entries, moore_neighborhood())


def random_table(k: int, n: int, rng: random.Random, neighborhood: Optional[Neighborhood] = None) -> TransitionTable:
    return TransitionTable(k, n, [rng.randrange(k) for _ in range(k ** n)], neighborhood)
