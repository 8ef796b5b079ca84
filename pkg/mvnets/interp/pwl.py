import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from mvnets.cellular.table import TransitionTable
from mvnets.errors import ShapeError
from mvnets.interp.simplex import Simplex, iter_simplices, locate_simplex

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearPiece:
    """m·x + bias_num/(k-1) with integer m and bias_num."""
    weights: Tuple[int, ...]
    bias_num: int

    def bias(self, k: int) -> Fraction:
        return Fraction(self.bias_num, k - 1)

    def value(self, x: Sequence[Fraction], k: int) -> Fraction:
        return sum((m * Fraction(xi) for m, xi in zip(self.weights, x)), Fraction(0)) + self.bias(k)

    def value_at_vertex(self, v: Sequence[int], k: int) -> Fraction:
        """Value at the lattice point v/(k-1)."""
        return Fraction(sum(m * vi for m, vi in zip(self.weights, v)) + self.bias_num, k - 1)

    def describe(self, k: int) -> str:
        terms = [f"{m}*x{i}" for i, m in enumerate(self.weights) if m]
        return " + ".join(terms + [str(self.bias(k))])


@dataclass
class PwlFunction:
    k: int
    n: int
    table: TransitionTable
    # 重複なしのピース一覧
    pieces: List[LinearPiece] = field(default_factory=list)
    simplices: List[Simplex] = field(default_factory=list)
    piece_of: Dict[tuple, int] = field(default_factory=dict)

    def piece_for(self, simplex: Simplex) -> LinearPiece:
        return self.pieces[self.piece_of[simplex.key]]


def fit_piece(table: TransitionTable, simplex: Simplex) -> LinearPiece:
    """
    Forward substitution along the vertex chain: the weight of the coordinate
    stepped between vertex t-1 and t is the difference of their table values.
    """
    verts = simplex.vertices
    values = [table.lookup(v) for v in verts]
    weights = [0] * table.n
    for t, i in enumerate(simplex.order, start=1):
        weights[i] = values[t] - values[t - 1]
    bias_num = values[0] - sum(m * c for m, c in zip(weights, simplex.cell))
    return LinearPiece(tuple(weights), bias_num)


def interpolate_table(table: TransitionTable) -> PwlFunction:
    pwl = PwlFunction(table.k, table.n, table)
    index: Dict[LinearPiece, int] = {}
    for simplex in iter_simplices(table.k, table.n):
        piece = fit_piece(table, simplex)
        if piece not in index:
            index[piece] = len(pwl.pieces)
            pwl.pieces.append(piece)
        pwl.simplices.append(simplex)
        pwl.piece_of[simplex.key] = index[piece]
    logger.debug(f"interpolated k={table.k}, n={table.n}: {len(pwl.simplices)} simplices, {len(pwl.pieces)} pieces")
    return pwl


def eval_pwl(pwl: PwlFunction, x: Sequence[Fraction]) -> Fraction:
    if len(x) != pwl.n:
        raise ShapeError(f"expected a point of dimension {pwl.n}, got {len(x)}")
    return pwl.piece_for(locate_simplex(x, pwl.k)).value(x, pwl.k)
