import logging
import math
from fractions import Fraction
from typing import Optional

import numpy as np

from mvnets.errors import ActivationKindError, RangeError
from mvnets.netcore.bounds import IntervalBox, clamp_interval, layer_interval
from mvnets.netcore.constructions import merge_pair
from mvnets.netcore.network import AffineLayer, Network, audit_weights, frac_vector, network_kind

logger = logging.getLogger(__name__)


def sigma_copies(upper: Fraction) -> int:
    """Least m with ρ(f) = σ(f) + σ(f-1) + ... + σ(f-m) whenever f <= upper."""
    return max(0, math.ceil(upper) - 1)


def relu_to_sigma(net: Network, k: Optional[int] = None, domain: IntervalBox = None) -> Network:
    """
    Replace every ρ-neuron f by σ(f), σ(f-1), ..., σ(f-m), m from the bound of
    f over the already converted prefix, and let the next layer read their sum.
    Duplicate neurons are merged after each layer. The depth is unchanged; a
    ρ-tagged output layer is retagged σ, which needs its outputs in [0,1].
    """
    kind = network_kind(net)
    if kind not in ("relu", "affine"):
        raise ActivationKindError(f"relu_to_sigma needs a ReLU network, got a {kind} network")
    audit_weights(net, k)
    domain = domain or IntervalBox.unit(net.input_dim)
    lo, hi = frac_vector(domain.lower), frac_vector(domain.upper)

    layers = list(net.layers)
    for li in range(len(layers)):
        layer = layers[li]
        pre_lo, pre_hi = layer_interval(layer, lo, hi)
        if layer.activation != "relu":
            lo, hi = clamp_interval(pre_lo, pre_hi, layer.activation)
            continue
        if li + 1 == len(layers):
            # 出力層: ρ = σ となるのは上界が 1 以下のときだけ
            if any(u > 1 for u in pre_hi):
                raise RangeError("a ρ output layer exceeding 1 on the domain has no σ form of the same depth")
            layers[li] = layer.with_activation("sigma")
            break
        rows, biases, owner = [], [], []
        for r in range(layer.out_dim):
            for t in range(sigma_copies(pre_hi[r]) + 1):
                rows.append(layer.weights[r])
                biases.append(layer.bias[r] - t)
                owner.append(r)
        converted = AffineLayer(np.vstack(rows), np.array(biases, dtype=object), "sigma")
        nxt = layers[li + 1]
        reader = AffineLayer(nxt.weights[:, owner], nxt.bias, nxt.activation)
        converted, layers[li + 1] = merge_pair(converted, reader)
        layers[li] = converted
        lo, hi = clamp_interval(*layer_interval(converted, lo, hi), "sigma")

    out = Network(net.input_dim, layers)
    logger.debug(f"relu_to_sigma: widths {net.widths} -> {out.widths}")
    return out


def sigma_to_relu(net: Network) -> Network:
    """
    σ(f) = ρ(f) - ρ(f - 1) for every hidden σ-neuron; hidden widths double and
    the depth is unchanged. The output layer must be untagged.
    """
    kind = network_kind(net)
    if kind not in ("sigma", "affine"):
        raise ActivationKindError(f"sigma_to_relu needs a σ-network, got a {kind} network")
    if net.layers[-1].activation != "none":
        raise ActivationKindError("sigma_to_relu needs an untagged output layer; a σ output has no ReLU form "
                                  "of the same depth")
    layers = list(net.layers)
    for li in range(len(layers) - 1):
        layer = layers[li]
        if layer.activation != "sigma":
            continue
        W = np.vstack([layer.weights, layer.weights])
        b = np.concatenate([layer.bias, layer.bias - 1])
        layers[li] = AffineLayer(W, b, "relu")
        nxt = layers[li + 1]
        layers[li + 1] = AffineLayer(np.hstack([nxt.weights, -nxt.weights]), nxt.bias, nxt.activation)
    return Network(net.input_dim, layers)
