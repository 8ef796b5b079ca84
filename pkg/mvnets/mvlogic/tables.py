import logging
from typing import List, Optional, Sequence

from mvnets.cellular.table import TransitionTable
from mvnets.errors import DomainError, PreconditionError
from mvnets.mvlogic.semantics import as_valuations, eval_term_batch, lattice_points
from mvnets.mvlogic.terms import ZERO, DmvTerm, Not, Var, odot_chain, oplus_chain, term_variables

logger = logging.getLogger(__name__)


def table_variables(table: TransitionTable) -> List[int]:
    """Variable offset of each tuple position of the table."""
    if table.neighborhood is not None:
        return table.neighborhood.variables()
    return list(range(table.n))


def boolean_dnf(table: TransitionTable, variables: Optional[Sequence[int]] = None) -> DmvTerm:
    """
    Disjunction of one ⊙-minterm per input with output 1, in ascending input order.
    """
    if table.k != 2:
        raise PreconditionError(f"boolean_dnf needs k=2, got k={table.k}")
    variables = list(variables) if variables is not None else table_variables(table)
    if len(variables) != table.n:
        raise PreconditionError(f"{len(variables)} variables for a table of arity {table.n}")
    minterms = []
    for xs, out in table.items():
        if out == 1:
            literals = [Var(v) if bit else Not(Var(v)) for v, bit in zip(variables, xs)]
            minterms.append(odot_chain(literals))
    if not minterms:
        return ZERO
    logger.debug(f"DNF with {len(minterms)} minterms over {table.n} variables")
    return oplus_chain(minterms)


def table_from_term(term: DmvTerm, k: int, variables: Optional[Sequence[int]] = None) -> TransitionTable:
    """Restrict a term function to K^n; every value must itself be a state."""
    variables = list(variables) if variables is not None else term_variables(term)
    if not variables:
        raise PreconditionError("a table needs at least one variable; declare them explicitly")
    points = lattice_points(len(variables), k)
    values = eval_term_batch(term, as_valuations(points, variables))
    entries = []
    for point, v in zip(points, values):
        scaled = v * (k - 1)
        if scaled.denominator != 1:
            raise DomainError(f"term value {v} at {tuple(str(p) for p in point)} is not a state of K for k={k}")
        entries.append(int(scaled))
    return TransitionTable(k, len(variables), entries)
