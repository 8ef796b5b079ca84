import logging
from typing import Dict, List, Optional, Sequence

from mvnets.compiler.gates import delta_gate, gate_odot_n, gate_oplus_n, not_gate
from mvnets.errors import UnboundVariableError
from mvnets.mvlogic.terms import (
    DmvTerm, Delta, Not, Odot, Oplus, Var, Zero, expand_sugar, iter_postorder, term_variables,
)
from mvnets.netcore.constructions import augment, compose, parallelize, select_inputs, zeros
from mvnets.netcore.network import AffineLayer, Network, frac_vector

logger = logging.getLogger(__name__)


def chain_operands(node: DmvTerm) -> List[DmvTerm]:
    """Operands of the maximal ⊕ (or ⊙) chain rooted at node, left to right."""
    kind = type(node)
    out = []
    stack = [node]
    while stack:
        cur = stack.pop()
        if type(cur) is kind:
            stack.append(cur.right)
            stack.append(cur.left)
        else:
            out.append(cur)
    return out


def gate_over(parts: List[Network], gate: Network) -> Network:
    depth = max(p.depth for p in parts)
    stacked = parallelize([augment(p, depth) for p in parts])
    return compose(stacked, gate, junction="affine")


class TermCompiler:
    """
    DMV term -> ReLU network over a declared variable order.

    ⊕ and ⊙ chains become one n-ary gate each (both operations are
    associative on [0,1]); shared subterms are compiled once.
    """

    def __init__(self, variables: Optional[Sequence[int]] = None):
        self.variables = list(variables) if variables is not None else None

    def needed_nodes(self, term: DmvTerm) -> set:
        needed = set()
        stack = [term]
        while stack:
            node = stack.pop()
            if id(node) in needed:
                continue
            needed.add(id(node))
            kids = chain_operands(node) if isinstance(node, (Oplus, Odot)) else node.children()
            stack.extend(kids)
        return needed

    def compile(self, term: DmvTerm) -> Network:
        term = expand_sugar(term)
        variables = self.variables if self.variables is not None else term_variables(term)
        position = {v: i for i, v in enumerate(variables)}
        n = len(variables)
        needed = self.needed_nodes(term)

        done: Dict[int, Network] = {}
        for node in iter_postorder(term):
            if id(node) not in needed:
                continue
            if isinstance(node, Zero):
                net = Network(n, [AffineLayer(zeros(1, n), frac_vector([0]))])
            elif isinstance(node, Var):
                if node.offset not in position:
                    raise UnboundVariableError(f"{node.name} is not among the declared variables {variables}")
                net = select_inputs(n, [position[node.offset]])
            elif isinstance(node, Not):
                net = compose(done[id(node.child)], not_gate(), junction="affine")
            elif isinstance(node, Delta):
                net = compose(done[id(node.child)], delta_gate(node.i), junction="affine")
            elif isinstance(node, (Oplus, Odot)):
                parts = [done[id(op)] for op in chain_operands(node)]
                gate = gate_oplus_n(len(parts)) if isinstance(node, Oplus) else gate_odot_n(len(parts))
                net = gate_over(parts, gate)
            else:
                raise TypeError(f"unknown term node {type(node).__name__}")
            done[id(node)] = net
        net = done[id(term)]
        logger.debug(f"compiled term over {n} variables to depth {net.depth}, widths {net.widths}")
        return net


def compile_term(term: DmvTerm, variables: Optional[Sequence[int]] = None) -> Network:
    return TermCompiler(variables).compile(term)
