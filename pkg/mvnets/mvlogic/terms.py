"""
DMV term AST.

Nodes are immutable and may be shared, so a term is a DAG. Every traversal
below is iterative; extracted terms are far deeper than the recursion limit.
"""
from dataclasses import dataclass
from typing import Dict, Iterator, List, Sequence, Tuple

from mvnets.errors import PreconditionError


class DmvTerm:
    """Base class of all term nodes."""
    __slots__ = ()

    def children(self) -> Tuple["DmvTerm", ...]:
        return ()


@dataclass(frozen=True)
class Zero(DmvTerm):
    pass


@dataclass(frozen=True)
class Var(DmvTerm):
    # CA の近傍オフセット (2D では近傍の通し番号)
    offset: int

    @property
    def name(self) -> str:
        return f"x[{self.offset}]"


@dataclass(frozen=True)
class Not(DmvTerm):
    child: DmvTerm

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Oplus(DmvTerm):
    left: DmvTerm
    right: DmvTerm

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Odot(DmvTerm):
    left: DmvTerm
    right: DmvTerm

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Delta(DmvTerm):
    i: int
    child: DmvTerm

    def __post_init__(self):
        if self.i < 1:
            raise PreconditionError(f"delta index must be >= 1, got {self.i}")

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Wedge(DmvTerm):
    """x ∧ y, sugar for (x ⊕ ¬y) ⊙ y."""
    left: DmvTerm
    right: DmvTerm

    def children(self):
        return (self.left, self.right)


ZERO = Zero()
ONE = Not(ZERO)


# === 1. Builders ===
def wedge(x: DmvTerm, y: DmvTerm) -> DmvTerm:
    """Expanded form of x ∧ y."""
    return Odot(Oplus(x, Not(y)), y)


def oplus_chain(terms: Sequence[DmvTerm]) -> DmvTerm:
    """Left-associated ⊕ over terms; the empty chain is 0."""
    if not terms:
        return ZERO
    acc = terms[0]
    for t in terms[1:]:
        acc = Oplus(acc, t)
    return acc


def odot_chain(terms: Sequence[DmvTerm]) -> DmvTerm:
    """Left-associated ⊙ over terms; the empty chain is 1."""
    if not terms:
        return ONE
    acc = terms[0]
    for t in terms[1:]:
        acc = Odot(acc, t)
    return acc


# === 2. Traversal ===
def iter_postorder(term: DmvTerm) -> Iterator[DmvTerm]:
    """
    Yield every distinct node (by identity) once, children before parents.
    """
    seen = set()
    stack: List[Tuple[DmvTerm, bool]] = [(term, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in seen:
            continue
        if expanded:
            seen.add(id(node))
            yield node
            continue
        stack.append((node, True))
        for child in reversed(node.children()):
            if id(child) not in seen:
                stack.append((child, False))


def term_size(term: DmvTerm) -> int:
    """Number of distinct DAG nodes."""
    return sum(1 for _ in iter_postorder(term))


def term_variables(term: DmvTerm) -> List[int]:
    return sorted({node.offset for node in iter_postorder(term) if isinstance(node, Var)})


def rebuild(node: DmvTerm, kids: Sequence[DmvTerm]) -> DmvTerm:
    """Same node kind over new children."""
    if isinstance(node, (Zero, Var)):
        return node
    if isinstance(node, Not):
        return Not(kids[0])
    if isinstance(node, Delta):
        return Delta(node.i, kids[0])
    if isinstance(node, Oplus):
        return Oplus(kids[0], kids[1])
    if isinstance(node, Odot):
        return Odot(kids[0], kids[1])
    if isinstance(node, Wedge):
        return Wedge(kids[0], kids[1])
    raise TypeError(f"unknown term node {type(node).__name__}")


def expand_sugar(term: DmvTerm) -> DmvTerm:
    """Replace every Wedge by its definition; sharing is kept."""
    done: Dict[int, DmvTerm] = {}
    for node in iter_postorder(term):
        kids = [done[id(c)] for c in node.children()]
        if isinstance(node, Wedge):
            done[id(node)] = wedge(kids[0], kids[1])
        elif all(k is c for k, c in zip(kids, node.children())):
            done[id(node)] = node
        else:
            done[id(node)] = rebuild(node, kids)
    return done[id(term)]


def substitute(term: DmvTerm, mapping: Dict[int, DmvTerm]) -> DmvTerm:
    """Replace Var(offset) by mapping[offset]; unmapped variables stay."""
    done: Dict[int, DmvTerm] = {}
    for node in iter_postorder(term):
        if isinstance(node, Var):
            done[id(node)] = mapping.get(node.offset, node)
            continue
        kids = [done[id(c)] for c in node.children()]
        if all(k is c for k, c in zip(kids, node.children())):
            done[id(node)] = node
        else:
            done[id(node)] = rebuild(node, kids)
    return done[id(term)]
