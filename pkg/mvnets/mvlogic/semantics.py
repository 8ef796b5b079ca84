import itertools
import logging
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from mvnets.errors import DomainError, UnboundVariableError
from mvnets.mvlogic.terms import (
    DmvTerm, Delta, Not, Odot, Oplus, Var, Wedge, Zero, iter_postorder,
)

logger = logging.getLogger(__name__)

Valuation = Mapping[int, Fraction]

ONE_Q = Fraction(1)
ZERO_Q = Fraction(0)


# === 1. Standard DMV algebra on [0,1] ===
def op_oplus(a: Fraction, b: Fraction) -> Fraction:
    return min(ONE_Q, a + b)


def op_odot(a: Fraction, b: Fraction) -> Fraction:
    return max(ZERO_Q, a + b - 1)


def op_not(a: Fraction) -> Fraction:
    return 1 - a


def op_delta(i: int, a: Fraction) -> Fraction:
    return a / i


def check_valuation(val: Valuation, variables: Sequence[int]) -> None:
    for offset in variables:
        if offset not in val:
            raise UnboundVariableError(f"variable x[{offset}] is not bound")
        v = val[offset]
        if not (0 <= v <= 1):
            raise DomainError(f"x[{offset}] = {v} is outside [0,1]")


def eval_term(term: DmvTerm, val: Valuation) -> Fraction:
    """Exact value of the term function under the valuation."""
    return eval_term_batch(term, [val])[0]


def eval_term_batch(term: DmvTerm, vals: Sequence[Valuation]) -> List[Fraction]:
    """
    Evaluate one term at many valuations in a single DAG traversal.
    """
    nodes = list(iter_postorder(term))
    variables = sorted({n.offset for n in nodes if isinstance(n, Var)})
    for val in vals:
        check_valuation(val, variables)

    size = len(vals)
    values: Dict[int, List[Fraction]] = {}
    for node in nodes:
        if isinstance(node, Zero):
            out = [ZERO_Q] * size
        elif isinstance(node, Var):
            out = [Fraction(val[node.offset]) for val in vals]
        elif isinstance(node, Not):
            out = [1 - a for a in values[id(node.child)]]
        elif isinstance(node, Delta):
            out = [a / node.i for a in values[id(node.child)]]
        elif isinstance(node, Oplus):
            out = [min(ONE_Q, a + b) for a, b in zip(values[id(node.left)], values[id(node.right)])]
        elif isinstance(node, Odot):
            out = [max(ZERO_Q, a + b - 1) for a, b in zip(values[id(node.left)], values[id(node.right)])]
        elif isinstance(node, Wedge):
            # (x ⊕ ¬y) ⊙ y = min(x, y)
            out = [min(a, b) for a, b in zip(values[id(node.left)], values[id(node.right)])]
        else:
            raise TypeError(f"unknown term node {type(node).__name__}")
        values[id(node)] = out
    return values[id(term)]


def terms_equal_on_grid(t1: DmvTerm, t2: DmvTerm, grid: Sequence[Valuation]) -> bool:
    return first_term_mismatch(t1, t2, grid) is None


def first_term_mismatch(
    t1: DmvTerm, t2: DmvTerm, grid: Sequence[Valuation]
) -> Optional[Tuple[Valuation, Fraction, Fraction]]:
    """First grid point where the two term functions differ, else None."""
    v1 = eval_term_batch(t1, grid)
    v2 = eval_term_batch(t2, grid)
    for point, a, b in zip(grid, v1, v2):
        if a != b:
            return point, a, b
    return None


# === 2. Grids ===
def unit_grid(n: int, density: int) -> List[Tuple[Fraction, ...]]:
    """Uniform grid {0, 1/(density-1), ..., 1}^n."""
    if density < 2:
        raise DomainError(f"grid density must be >= 2, got {density}")
    axis = [Fraction(i, density - 1) for i in range(density)]
    return list(itertools.product(axis, repeat=n))


def lattice_points(n: int, k: int) -> List[Tuple[Fraction, ...]]:
    """K^n in base-k order, first coordinate most significant."""
    return unit_grid(n, k)


def as_valuations(points: Sequence[Sequence[Fraction]], variables: Sequence[int]) -> List[Dict[int, Fraction]]:
    return [dict(zip(variables, p)) for p in points]
