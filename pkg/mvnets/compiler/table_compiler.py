import logging

from mvnets.cellular.table import TransitionTable
from mvnets.compiler.lattice import compile_lattice, lattice_form
from mvnets.errors import CapExceededError, IncompleteTableError, PreconditionError
from mvnets.interp.pwl import interpolate_table
from mvnets.netcore.network import AffineLayer, Network

logger = logging.getLogger(__name__)

DEFAULT_CAP = 6


def require_complete(identification, allow_incomplete: bool = False) -> TransitionTable:
    """Table of an identification result, refusing partial coverage unless allowed."""
    if identification.missing and not allow_incomplete:
        raise IncompleteTableError(
            f"table coverage is {identification.coverage}; {len(identification.missing)} inputs were never observed"
        )
    return identification.table


def compile_table(table: TransitionTable, cap: int = DEFAULT_CAP) -> Network:
    """Interpolate, take the lattice form, realize it with integer weights."""
    if table.n > cap:
        raise CapExceededError(f"n={table.n} exceeds the interpolation cap {cap}; use the Boolean path for k=2")
    pwl = interpolate_table(table)
    net = compile_lattice(lattice_form(pwl))
    logger.info(f"compiled k={table.k}, n={table.n} table: depth {net.depth}, widths {net.widths}")
    return net


def compile_boolean(table: TransitionTable) -> Network:
    """
    Three layers: one neuron per true minterm u, ρ(Σ_{u=1} x - Σ_{u=0} x - (|u| - 1)),
    then the two-channel n-ary ⊕ over them.
    """
    if table.k != 2:
        raise PreconditionError(f"the Boolean path needs k=2, got k={table.k}")
    rows, biases = [], []
    for xs, out in table.items():
        if out == 1:
            rows.append([1 if x else -1 for x in xs])
            biases.append(-(sum(xs) - 1))
    if not rows:
        rows, biases = [[0] * table.n], [0]
    m = len(rows)
    layers = [
        AffineLayer(rows, biases, "relu"),
        AffineLayer([[1] * m, [1] * m], [0, -1], "relu"),
        AffineLayer([[1, -1]], [0]),
    ]
    logger.debug(f"Boolean network with {m} minterm neurons")
    return Network(table.n, layers)
