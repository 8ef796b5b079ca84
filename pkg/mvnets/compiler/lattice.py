import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from mvnets.compiler.gates import max_gadget, min_gadget
from mvnets.errors import PreconditionError, WeightDisciplineError
from mvnets.interp.pwl import LinearPiece, PwlFunction
from mvnets.netcore.constructions import compose, eye, identity_network, zeros
from mvnets.netcore.network import AffineLayer, Network, frac_vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LatticeExpr:
    """max over `terms` of min over the pieces each term indexes."""
    pieces: Tuple[LinearPiece, ...]
    terms: Tuple[Tuple[int, ...], ...]
    k: int

    def __post_init__(self):
        if not self.terms:
            raise PreconditionError("lattice expression has no terms")
        for t in self.terms:
            if not t:
                raise PreconditionError("lattice term with no pieces")
            for i in t:
                if not 0 <= i < len(self.pieces):
                    raise PreconditionError(f"piece index {i} out of range")

    @property
    def n(self) -> int:
        return len(self.pieces[0].weights)

    def used_pieces(self) -> List[int]:
        return sorted({i for t in self.terms for i in t})


def eval_lattice(lat: LatticeExpr, x: Sequence[Fraction]) -> Fraction:
    values = [p.value(x, lat.k) for p in lat.pieces]
    return max(min(values[i] for i in t) for t in lat.terms)


def dominates_below(a: LinearPiece, b: LinearPiece, corners: List[Tuple[int, ...]], k: int) -> bool:
    """a <= b on all of [0,1]^n (checked at the cube corners)."""
    scale = k - 1
    for c in corners:
        va = sum(m * x for m, x in zip(a.weights, c)) * scale + a.bias_num
        vb = sum(m * x for m, x in zip(b.weights, c)) * scale + b.bias_num
        if va > vb:
            return False
    return True


def lattice_form(pwl: PwlFunction) -> LatticeExpr:
    """
    One min-term per simplex j holding every piece that is >= the piece of j
    on all vertices of j; min-terms are pruned of members dominated by another
    member. A min-term is then dropped from the max when another term is
    provably >= it on the whole cube (every member of the other term lies
    above some member of this one); of two equal terms the first is kept.
    """
    k, n = pwl.k, pwl.n
    pieces = pwl.pieces
    corners = list(itertools.product((0, 1), repeat=n))

    # 各ピースの格子点での値 (分子) をキャッシュ
    cache = {}

    def vertex_value(i: int, v: Tuple[int, ...]) -> int:
        key = (i, v)
        if key not in cache:
            p = pieces[i]
            cache[key] = sum(m * vi for m, vi in zip(p.weights, v)) + p.bias_num
        return cache[key]

    # below[i]: pieces <= piece i on the whole cube, i included
    below = [{o for o in range(len(pieces)) if dominates_below(pieces[o], pieces[i], corners, k)}
             for i in range(len(pieces))]

    seen = set()
    terms: List[Tuple[int, ...]] = []
    for simplex in pwl.simplices:
        j = pwl.piece_of[simplex.key]
        verts = simplex.vertices
        members = [i for i in range(len(pieces))
                   if all(vertex_value(i, v) >= vertex_value(j, v) for v in verts)]
        kept = [i for i in members if not any(o != i and o in below[i] for o in members)]
        term = tuple(sorted(kept))
        if term not in seen:
            seen.add(term)
            terms.append(term)

    sets = [set(t) for t in terms]

    def covered(a: int, b: int) -> bool:
        """min over terms[a] <= min over terms[b] everywhere."""
        return all(not sets[a].isdisjoint(below[i]) for i in terms[b])

    needed = [t for a, t in enumerate(terms)
              if not any(b != a and covered(a, b) and (b < a or not covered(b, a)) for b in range(len(terms)))]
    logger.debug(f"lattice form: {len(pieces)} pieces, {len(terms)} terms, {len(needed)} after dominance pruning")
    return LatticeExpr(tuple(pieces), tuple(needed), k)


# === Network realization ===
def tree_level(groups: List[List[int]], width: int, gadget: Network) -> Tuple[Network, List[List[int]]]:
    """
    One level of the balanced min (or max) trees of every group.

    groups[g] lists the input channels still to be reduced for group g. Pairs
    go through the 2-ary gadget; an odd last channel passes through its first
    two neurons, ρ(x) - ρ(-x). Returns the 2-layer level network and the new
    groups.
    """
    hidden, readout = gadget.layers
    coeffs = readout.weights[0]
    n_rows = sum(hidden.out_dim * (len(g) // 2) + 2 * (len(g) % 2) for g in groups)
    n_out = sum((len(g) + 1) // 2 for g in groups)
    W_hidden = zeros(n_rows, width)
    b_hidden = frac_vector([0] * n_rows)
    W_out = zeros(n_out, n_rows)
    r = o = 0
    new_groups = []
    for channels in groups:
        new = []
        for p in range(0, len(channels), 2):
            pair = channels[p:p + 2]
            used = hidden.out_dim if len(pair) == 2 else 2
            for t in range(used):
                for c, w in hidden.sparse_rows[t]:
                    W_hidden[r + t, pair[c]] = W_hidden[r + t, pair[c]] + w
                b_hidden[r + t] = hidden.bias[t]
                W_out[o, r + t] = coeffs[t]
            r += used
            new.append(o)
            o += 1
        new_groups.append(new)
    layers = [AffineLayer(W_hidden, b_hidden, "relu"), AffineLayer(W_out, frac_vector([0] * n_out))]
    return Network(width, layers), new_groups


def clamp_pieces(pieces: Sequence[LinearPiece], k: int) -> Network:
    """s_i = σ(p_i) as 1 - ρ(1 - ρ(p_i)); integer weights, biases in Q_k."""
    n = len(pieces[0].weights)
    A = AffineLayer([list(p.weights) for p in pieces], [p.bias(k) for p in pieces], "relu")
    m = len(pieces)
    B = AffineLayer(-eye(m), frac_vector([1] * m), "relu")
    out = AffineLayer(-eye(m), frac_vector([1] * m))
    return Network(n, [A, B, out])


def compile_lattice(lat: LatticeExpr) -> Network:
    """
    ReLU network for a lattice expression. Pieces are clamped to [0,1] first,
    min-trees use `nonnegative` junctions and the max-tree `complement`
    junctions, so every hidden value stays provably in [0,1].
    """
    for idx, p in enumerate(lat.pieces):
        for j, m in enumerate(p.weights):
            if Fraction(m).denominator != 1:
                raise WeightDisciplineError(f"piece weight {m} is not an integer", layer=0, row=idx, col=j)
    used = lat.used_pieces()
    slot = {i: s for s, i in enumerate(used)}
    net = clamp_pieces([lat.pieces[i] for i in used], lat.k)
    junction = "affine"
    last_stage = None

    groups = [[slot[i] for i in t] for t in lat.terms]
    while any(len(g) > 1 for g in groups):
        level, groups = tree_level(groups, net.output_dim, min_gadget())
        net = compose(net, level, junction)
        junction, last_stage = "nonnegative", "min"

    groups = [[g[0] for g in groups]]
    # 単一チャネルへの射影
    if net.output_dim != len(groups[0]) or groups[0] != list(range(net.output_dim)):
        select = zeros(len(groups[0]), net.output_dim)
        for r, c in enumerate(groups[0]):
            select[r, c] = Fraction(1)
        net = compose(net, Network(net.output_dim, [AffineLayer(select, frac_vector([0] * len(groups[0])))]),
                      "affine")
        groups = [list(range(net.output_dim))]

    while len(groups[0]) > 1:
        level, groups = tree_level(groups, net.output_dim, max_gadget())
        net = compose(net, level, junction if last_stage != "max" else "complement")
        junction, last_stage = "complement", "max"

    # interval bounds of a gadget output exceed [0,1]; one more clamp makes the range provable
    if last_stage == "max":
        net = compose(net, identity_network(1), "complement")
    elif last_stage == "min":
        net = compose(net, identity_network(1), "nonnegative")
    logger.debug(f"compiled lattice: depth {net.depth}, widths {net.widths}")
    return net
