from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from mvnets.errors import PreconditionError, ShapeError
from mvnets.netcore.network import AffineLayer, Network, frac_vector


@dataclass(frozen=True)
class IntervalBox:
    lower: Tuple[Fraction, ...]
    upper: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ShapeError("lower and upper bounds differ in length")
        for i, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            if lo > hi:
                raise PreconditionError(f"coordinate {i}: lower bound {lo} exceeds upper bound {hi}")

    @classmethod
    def unit(cls, n: int) -> "IntervalBox":
        return cls((Fraction(0),) * n, (Fraction(1),) * n)

    @property
    def dim(self) -> int:
        return len(self.lower)


def layer_interval(layer: AffineLayer, lo: np.ndarray, hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Pre-activation interval of one layer over the input box [lo, hi]."""
    out_lo = np.empty(layer.out_dim, dtype=object)
    out_hi = np.empty(layer.out_dim, dtype=object)
    for r, row in enumerate(layer.sparse_rows):
        a = b = layer.bias[r]
        for c, w in row:
            if w > 0:
                a, b = a + w * lo[c], b + w * hi[c]
            else:
                a, b = a + w * hi[c], b + w * lo[c]
        out_lo[r], out_hi[r] = a, b
    return out_lo, out_hi


def clamp_interval(lo: np.ndarray, hi: np.ndarray, activation: str) -> Tuple[np.ndarray, np.ndarray]:
    if activation == "relu":
        zero = Fraction(0)
        return (np.array([max(zero, v) for v in lo], dtype=object),
                np.array([max(zero, v) for v in hi], dtype=object))
    if activation == "sigma":
        zero, one = Fraction(0), Fraction(1)
        return (np.array([min(one, max(zero, v)) for v in lo], dtype=object),
                np.array([min(one, max(zero, v)) for v in hi], dtype=object))
    return lo, hi


def preactivation_bounds(net: Network, domain: IntervalBox) -> List[List[Tuple[Fraction, Fraction]]]:
    """Sound per-neuron pre-activation intervals, layer by layer."""
    if domain.dim != net.input_dim:
        raise ShapeError(f"domain has dimension {domain.dim}, network takes {net.input_dim}")
    lo, hi = frac_vector(domain.lower), frac_vector(domain.upper)
    out = []
    for layer in net.layers:
        pre_lo, pre_hi = layer_interval(layer, lo, hi)
        out.append([(Fraction(a), Fraction(b)) for a, b in zip(pre_lo, pre_hi)])
        lo, hi = clamp_interval(pre_lo, pre_hi, layer.activation)
    return out


def output_bounds(net: Network, domain: IntervalBox = None) -> List[Tuple[Fraction, Fraction]]:
    """Intervals of the network outputs (after the last activation)."""
    domain = domain or IntervalBox.unit(net.input_dim)
    last = preactivation_bounds(net, domain)[-1]
    lo = frac_vector(a for a, _ in last)
    hi = frac_vector(b for _, b in last)
    lo, hi = clamp_interval(lo, hi, net.layers[-1].activation)
    return [(Fraction(a), Fraction(b)) for a, b in zip(lo, hi)]


def outputs_within(net: Network, lower: Fraction, upper: Fraction, domain: IntervalBox = None) -> bool:
    return all(lower <= a and b <= upper for a, b in output_bounds(net, domain))
