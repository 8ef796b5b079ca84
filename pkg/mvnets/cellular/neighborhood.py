import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from mvnets.errors import DomainError, PreconditionError, ShapeError

logger = logging.getLogger(__name__)

Offset = Tuple[int, ...]


# === 1. State set ===
@dataclass(frozen=True)
class StateSet:
    """K = {0, 1/(k-1), ..., 1}; index s stands for s/(k-1)."""
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise PreconditionError(f"k must be >= 2, got {self.k}")

    @property
    def values(self) -> List[Fraction]:
        return [Fraction(s, self.k - 1) for s in range(self.k)]

    def value(self, s: int) -> Fraction:
        if not 0 <= s < self.k:
            raise DomainError(f"state index {s} outside 0..{self.k - 1}")
        return Fraction(s, self.k - 1)

    def index(self, v: Fraction) -> int:
        scaled = Fraction(v) * (self.k - 1)
        if scaled.denominator != 1 or not 0 <= scaled <= self.k - 1:
            raise DomainError(f"{v} is not a state of K for k={self.k}")
        return int(scaled)


# === 2. Neighborhood ===
@dataclass(frozen=True)
class Neighborhood:
    """
    Ordered neighbor offsets in Z^d. Tuple position j of a table input reads
    the cell at z + offsets[j].
    """
    d: int
    offsets: Tuple[Offset, ...]

    def __post_init__(self):
        if self.d not in (1, 2):
            raise PreconditionError(f"only d in {{1, 2}} is supported, got d={self.d}")
        if not self.offsets:
            raise PreconditionError("neighborhood is empty")
        for o in self.offsets:
            if len(o) != self.d:
                raise ShapeError(f"offset {o} does not have dimension {self.d}")
        if len(set(self.offsets)) != len(self.offsets):
            raise PreconditionError(f"offsets are not distinct: {self.offsets}")
        if (0,) * self.d not in self.offsets:
            raise PreconditionError("neighborhood must contain the zero offset")

    @classmethod
    def line(cls, offsets: Sequence[int]) -> "Neighborhood":
        return cls(1, tuple((int(o),) for o in offsets))

    @classmethod
    def grid(cls, offsets: Sequence[Tuple[int, int]]) -> "Neighborhood":
        return cls(2, tuple((int(a), int(b)) for a, b in offsets))

    @property
    def n(self) -> int:
        return len(self.offsets)

    @property
    def flat(self) -> List[int]:
        """1D offsets as plain integers."""
        if self.d != 1:
            raise ShapeError("flat offsets exist only for d=1")
        return [o[0] for o in self.offsets]

    def variables(self) -> List[int]:
        """Term variable for each tuple position: the offset in 1D, the position in 2D."""
        if self.d == 1:
            return self.flat
        return list(range(self.n))

    def is_contiguous(self) -> bool:
        return self.d == 1 and self.flat == [-p for p in range(self.n)]

    def format(self) -> str:
        if self.d == 1:
            return ",".join(str(o) for o in self.flat)
        return ",".join(f"({a},{b})" for a, b in self.offsets)


def elementary_neighborhood() -> Neighborhood:
    # Wolfram の並び: x[-1] が最上位ビット
    return Neighborhood.line([-1, 0, 1])


def moore_neighborhood() -> Neighborhood:
    """Center first, then the 8 neighbors in row-major order."""
    rest = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dy, dx) != (0, 0)]
    return Neighborhood.grid([(0, 0)] + rest)


def contiguous_neighborhood(n: int) -> Neighborhood:
    return Neighborhood.line([-p for p in range(n)])


PAIR_RE = re.compile(r"\(\s*([+-]?\d+)\s*,\s*([+-]?\d+)\s*\)")


def parse_offsets(text: str) -> Neighborhood:
    """`-1,0,1` for a line, `(0,0),(-1,0)` for a grid."""
    text = text.strip()
    if not text:
        raise PreconditionError("empty offsets")
    if text.startswith("("):
        pairs = PAIR_RE.findall(text)
        rebuilt = ",".join(f"({a},{b})" for a, b in pairs)
        if rebuilt != re.sub(r"\s+", "", text):
            raise PreconditionError(f"cannot parse 2D offsets {text!r}")
        return Neighborhood.grid([(int(a), int(b)) for a, b in pairs])
    try:
        return Neighborhood.line([int(tok) for tok in text.split(",")])
    except ValueError:
        raise PreconditionError(f"cannot parse offsets {text!r}")


# === 3. Normalization to {0, -1, ..., -(n'-1)} ===
@dataclass(frozen=True)
class NormalizedNeighborhood:
    neighborhood: Neighborhood
    shift: int
    # 元の各オフセットが新しい近傍の何番目に当たるか
    positions: Tuple[int, ...]

    def lift(self, table) -> "TransitionTable":
        from mvnets.cellular.table import TransitionTable, decode_index

        if table.n != len(self.positions):
            raise ShapeError(f"table arity {table.n} does not match {len(self.positions)} offsets")
        n_new = self.neighborhood.n
        entries = []
        for idx in range(table.k ** n_new):
            y = decode_index(idx, table.k, n_new)
            entries.append(table.lookup(tuple(y[p] for p in self.positions)))
        return TransitionTable(table.k, n_new, entries)


def normalize_neighborhood(nbhd: Neighborhood) -> NormalizedNeighborhood:
    """
    Expand a 1D offset set to the contiguous span ending at 0.

    Evolving the lifted table on the result gives out'[z] = out[z - shift].
    """
    if nbhd.d != 1:
        raise PreconditionError("normalize_neighborhood needs a 1D neighborhood")
    offsets = nbhd.flat
    shift = max(offsets)
    span = shift - min(offsets) + 1
    positions = tuple(shift - o for o in offsets)
    if shift:
        logger.debug(f"neighborhood {offsets} normalized to span {span} with shift {shift}")
    return NormalizedNeighborhood(contiguous_neighborhood(span), shift, positions)
