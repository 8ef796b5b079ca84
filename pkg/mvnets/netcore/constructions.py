import logging
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from mvnets.errors import ActivationKindError, PreconditionError, RangeError, ShapeError
from mvnets.netcore.bounds import IntervalBox, outputs_within
from mvnets.netcore.network import AffineLayer, Network, frac_vector, network_kind, sparse_matmul

logger = logging.getLogger(__name__)

JUNCTIONS = ("identity", "nonnegative", "complement", "affine")


def eye(n: int) -> np.ndarray:
    out = np.empty((n, n), dtype=object)
    out[:, :] = Fraction(0)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def zeros(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    out[:, :] = Fraction(0)
    return out


def identity_network(dim: int) -> Network:
    return Network(dim, [AffineLayer(eye(dim), frac_vector([0] * dim))])


def select_inputs(input_dim: int, indices: Sequence[int]) -> Network:
    """One affine layer returning (x[indices[0]], x[indices[1]], ...)."""
    W = zeros(len(indices), input_dim)
    for r, i in enumerate(indices):
        if not 0 <= i < input_dim:
            raise ShapeError(f"input index {i} outside 0..{input_dim - 1}")
        W[r, i] = Fraction(1)
    return Network(input_dim, [AffineLayer(W, frac_vector([0] * len(indices)))])


def affine_network(weights, bias, input_dim: int = None) -> Network:
    layer = AffineLayer(weights, bias)
    return Network(layer.in_dim if input_dim is None else input_dim, [layer])


def shared_kind(*nets: Network) -> str:
    """Common activation kind; affine networks fit either. Defaults to relu."""
    kinds = {network_kind(net) for net in nets} - {"affine"}
    if "mixed" in kinds or len(kinds) > 1:
        raise ActivationKindError(f"cannot combine networks of kinds {sorted(kinds)}")
    return kinds.pop() if kinds else "relu"


# === 1. Composition ===
def merge_affine(inner: AffineLayer, outer: AffineLayer) -> AffineLayer:
    """outer ∘ inner for an untagged inner layer: W' = W_o W_i, b' = W_o b_i + b_o."""
    if inner.activation != "none":
        raise ActivationKindError(f"cannot fold a {inner.activation} layer into the next one")
    return AffineLayer(sparse_matmul(outer.weights, inner.weights),
                       sparse_matmul(outer.weights, inner.bias) + outer.bias, outer.activation)


def fold_affine_layers(net: Network) -> Network:
    """Same map with every untagged hidden layer folded into the layer after it."""
    layers = [net.layers[0]]
    for layer in net.layers[1:]:
        if layers[-1].activation == "none":
            layers[-1] = merge_affine(layers[-1], layer)
        else:
            layers.append(layer)
    if len(layers) < net.depth:
        logger.debug(f"folded {net.depth - len(layers)} untagged hidden layers")
    return Network(net.input_dim, layers)


def compose(first: Network, second: Network, junction: str = "identity",
            domain: IntervalBox = None) -> Network:
    """
    second ∘ first.

    identity     x = ρ(x) - ρ(-x), always valid, depth L1 + L2
    nonnegative  x = ρ(x), valid when first's outputs are >= 0, depth L1 + L2
    complement   ρ(1 - x) passed on, valid when outputs are <= 1, depth L1 + L2
    affine       the two adjacent affine maps are merged, depth L1 + L2 - 1

    σ-networks pass values through σ(x) = x when first's outputs lie in [0,1],
    through σ(x) - σ(-x) when they lie in [-1,1], and fail otherwise.
    """
    if first.output_dim != second.input_dim:
        raise ShapeError(f"first network outputs {first.output_dim} values, second takes {second.input_dim}")
    if junction not in JUNCTIONS:
        raise PreconditionError(f"unknown junction {junction!r}")
    if first.layers[-1].activation != "none":
        raise ActivationKindError("the first network must end in an affine layer")
    kind = shared_kind(first, second)
    last = first.layers[-1]
    head = first.layers[:-1]
    nxt = second.layers[0]
    tail = second.layers[1:]

    if junction == "affine":
        return Network(first.input_dim, head + [merge_affine(last, nxt)] + tail)

    if kind == "sigma":
        domain = domain or IntervalBox.unit(first.input_dim)
        if junction == "identity":
            if outputs_within(first, Fraction(0), Fraction(1), domain):
                junction = "nonnegative"
            elif not outputs_within(first, Fraction(-1), Fraction(1), domain):
                raise RangeError("σ-composition needs the first network's outputs in [-1, 1]")
        elif not outputs_within(first, Fraction(0), Fraction(1), domain):
            raise RangeError(f"σ {junction} junction needs the first network's outputs in [0, 1]")

    m = last.out_dim
    if junction == "identity":
        bridge = AffineLayer(np.vstack([last.weights, -last.weights]),
                             np.concatenate([last.bias, -last.bias]), kind)
        nxt = AffineLayer(np.hstack([nxt.weights, -nxt.weights]), nxt.bias, nxt.activation)
    elif junction == "nonnegative":
        bridge = last.with_activation(kind)
    else:
        # c = ρ(1 - x), 次の層は 1 - c を読む
        bridge = AffineLayer(-last.weights, frac_vector([1] * m) - last.bias, kind)
        nxt = AffineLayer(-nxt.weights, nxt.bias + sparse_matmul(nxt.weights, frac_vector([1] * m)), nxt.activation)
    return Network(first.input_dim, head + [bridge, nxt] + tail)


# === 2. Depth alignment ===
def augment(net: Network, target_depth: int) -> Network:
    """Same map at depth target_depth, padded with identity layers."""
    if target_depth < net.depth:
        raise PreconditionError(f"cannot augment depth {net.depth} down to {target_depth}")
    extra = target_depth - net.depth
    if extra == 0:
        return net
    kind = network_kind(net)
    if kind == "mixed":
        raise ActivationKindError("cannot augment a mixed network")
    last = net.layers[-1]
    m = last.out_dim
    head = net.layers[:-1]

    if kind == "sigma":
        if not outputs_within(net, Fraction(0), Fraction(1)):
            raise RangeError("σ-augmentation needs outputs in [0, 1]")
        pads = [last.with_activation("sigma")]
        pads += [AffineLayer(eye(m), frac_vector([0] * m), "sigma") for _ in range(extra - 1)]
        pads.append(AffineLayer(eye(m), frac_vector([0] * m)))
        return Network(net.input_dim, head + pads)

    split = AffineLayer(np.vstack([last.weights, -last.weights]), np.concatenate([last.bias, -last.bias]), "relu")
    keep = np.vstack([np.hstack([eye(m), -eye(m)]), np.hstack([-eye(m), eye(m)])])
    pads = [split]
    pads += [AffineLayer(keep, frac_vector([0] * 2 * m), "relu") for _ in range(extra - 1)]
    pads.append(AffineLayer(np.hstack([eye(m), -eye(m)]), frac_vector([0] * m)))
    return Network(net.input_dim, head + pads)


def parallelize(nets: Sequence[Network]) -> Network:
    """Stack networks on a shared input; the output concatenates theirs."""
    if not nets:
        raise PreconditionError("nothing to parallelize")
    if len(nets) == 1:
        return nets[0]
    input_dim, depth = nets[0].input_dim, nets[0].depth
    for net in nets[1:]:
        if net.input_dim != input_dim:
            raise ShapeError(f"input dims differ: {input_dim} vs {net.input_dim}")
        if net.depth != depth:
            raise ShapeError(f"depths differ: {depth} vs {net.depth}; augment first")
    layers = []
    for li in range(depth):
        parts = [net.layers[li] for net in nets]
        acts = {p.activation for p in parts}
        if len(acts) != 1:
            raise ActivationKindError(f"layer {li} mixes activations {sorted(acts)}")
        bias = np.concatenate([p.bias for p in parts])
        if li == 0:
            W = np.vstack([p.weights for p in parts])
        else:
            W = zeros(sum(p.out_dim for p in parts), sum(p.in_dim for p in parts))
            r = c = 0
            for p in parts:
                W[r:r + p.out_dim, c:c + p.in_dim] = p.weights
                r += p.out_dim
                c += p.in_dim
        layers.append(AffineLayer(W, bias, acts.pop()))
    return Network(input_dim, layers)


# === 3. Neuron merging ===
def activate_scalar(v: Fraction, activation: str) -> Fraction:
    if activation == "relu":
        return max(Fraction(0), v)
    if activation == "sigma":
        return min(Fraction(1), max(Fraction(0), v))
    return v


def merge_pair(cur: AffineLayer, nxt: AffineLayer) -> Tuple[AffineLayer, AffineLayer]:
    """Merge the neurons of `cur`, rewriting the columns of `nxt` that read them."""
    # nxt の列を疎に: 列番号 -> {行: 重み}
    readers: List[Dict[int, Fraction]] = [{} for _ in range(cur.out_dim)]
    for i, row in enumerate(nxt.sparse_rows):
        for c, w in row:
            readers[c][i] = w
    groups: Dict[Tuple, int] = {}
    rows, biases, cols = [], [], []
    next_bias = nxt.bias.copy()
    for r, sparse in enumerate(cur.sparse_rows):
        if not sparse:
            value = activate_scalar(cur.bias[r], cur.activation)
            for i, w in readers[r].items():
                next_bias[i] = next_bias[i] + w * value
            continue
        key = (tuple(sparse), cur.bias[r])
        if key in groups:
            col = cols[groups[key]]
            for i, w in readers[r].items():
                col[i] = col.get(i, Fraction(0)) + w
        else:
            groups[key] = len(rows)
            rows.append(r)
            biases.append(cur.bias[r])
            cols.append(dict(readers[r]))
    live = [g for g in range(len(rows)) if any(v != 0 for v in cols[g].values())]
    if not live:
        W_cur = zeros(1, cur.in_dim)
        b_cur = frac_vector([0])
        W_next = zeros(nxt.out_dim, 1)
    else:
        W_cur = cur.weights[[rows[g] for g in live]]
        b_cur = np.array([biases[g] for g in live], dtype=object)
        W_next = zeros(nxt.out_dim, len(live))
        for c, g in enumerate(live):
            for i, w in cols[g].items():
                W_next[i, c] = w
    return AffineLayer(W_cur, b_cur, cur.activation), AffineLayer(W_next, next_bias, nxt.activation)


def merge_duplicate_neurons(net: Network) -> Network:
    """
    Same map with fewer hidden neurons: identical (row, bias) neurons are
    merged by summing their outgoing columns, constant neurons are folded
    into the next bias and neurons nobody reads are dropped.
    """
    layers = list(net.layers)
    for li in range(len(layers) - 1):
        layers[li], layers[li + 1] = merge_pair(layers[li], layers[li + 1])
    merged = Network(net.input_dim, layers)
    logger.debug(f"merged neurons: widths {net.widths} -> {merged.widths}")
    return merged
