import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

from mvnets.errors import DomainError, PreconditionError

LatticePoint = Tuple[int, ...]


@dataclass(frozen=True)
class Simplex:
    """
    Kuhn simplex of the cell `cell` (lower corner, lattice units): vertex t is
    vertex t-1 plus one step along coordinate order[t-1].
    """
    cell: LatticePoint
    order: Tuple[int, ...]

    @property
    def vertices(self) -> List[LatticePoint]:
        return simplex_vertices(self.cell, self.order)

    @property
    def key(self) -> Tuple[LatticePoint, Tuple[int, ...]]:
        return self.cell, self.order


def simplex_vertices(cell: Sequence[int], order: Sequence[int]) -> List[LatticePoint]:
    v = list(cell)
    out = [tuple(v)]
    for i in order:
        v[i] += 1
        out.append(tuple(v))
    return out


def iter_simplices(k: int, n: int) -> Iterator[Simplex]:
    """All (k-1)^n * n! simplices, cells in base-(k-1) order, orders lexicographic."""
    if k < 2 or n < 1:
        raise PreconditionError(f"need k >= 2 and n >= 1, got k={k}, n={n}")
    orders = list(itertools.permutations(range(n)))
    for cell in itertools.product(range(k - 1), repeat=n):
        for order in orders:
            yield Simplex(cell, order)


def split_point(x: Sequence[Fraction], k: int) -> Tuple[LatticePoint, List[Fraction]]:
    """Cell of x and its local coordinates in [0,1]^n, in lattice units."""
    cell, local = [], []
    for j, xi in enumerate(x):
        xi = Fraction(xi)
        if not 0 <= xi <= 1:
            raise DomainError(f"coordinate {j} = {xi} is outside [0,1]")
        scaled = xi * (k - 1)
        # 1 は最後のセルに属する
        c = min(math.floor(scaled), k - 2)
        cell.append(c)
        local.append(scaled - c)
    return tuple(cell), local


def locate_simplex(x: Sequence[Fraction], k: int) -> Simplex:
    """
    Simplex containing x: sort the local coordinates descending, ties by
    ascending coordinate index.
    """
    if not x:
        raise DomainError("cannot locate a point of dimension 0")
    cell, local = split_point(x, k)
    order = tuple(sorted(range(len(x)), key=lambda i: (-local[i], i)))
    return Simplex(cell, order)
