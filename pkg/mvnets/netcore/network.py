import logging
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from mvnets.errors import ActivationKindError, ShapeError, WeightDisciplineError

logger = logging.getLogger(__name__)

ACTIVATIONS = ("relu", "sigma", "none")


def frac_matrix(rows, n_cols: Optional[int] = None) -> np.ndarray:
    """Object-dtype matrix of Fractions; n_cols fixes the shape of an empty matrix."""
    rows = [list(r) for r in rows]
    if n_cols is None:
        n_cols = len(rows[0]) if rows else 0
    out = np.empty((len(rows), n_cols), dtype=object)
    for i, row in enumerate(rows):
        if len(row) != n_cols:
            raise ShapeError(f"row {i} has {len(row)} entries, expected {n_cols}")
        for j, v in enumerate(row):
            out[i, j] = Fraction(v)
    return out


def frac_vector(values) -> np.ndarray:
    values = list(values)
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = Fraction(v)
    return out


def sparse_rows_of(M: np.ndarray) -> List[List[Tuple[int, Fraction]]]:
    return [[(int(c), M[r, c]) for c in np.flatnonzero(M[r] != 0)] for r in range(M.shape[0])]


def sparse_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """A·B over Fractions; only nonzero entries of A and B are multiplied. B may be a vector."""
    vector = B.ndim == 1
    Bm = B.reshape(-1, 1) if vector else B
    if A.shape[1] != Bm.shape[0]:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    b_rows = sparse_rows_of(Bm)
    out = np.empty((A.shape[0], Bm.shape[1]), dtype=object)
    out[:, :] = Fraction(0)
    for r, row in enumerate(sparse_rows_of(A)):
        acc = {}
        for i, a in row:
            for c, b in b_rows[i]:
                acc[c] = acc.get(c, Fraction(0)) + a * b
        for c, v in acc.items():
            out[r, c] = v
    return out[:, 0] if vector else out


def apply_activation(v: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return np.array([x if x > 0 else Fraction(0) for x in v.flat], dtype=object).reshape(v.shape)
    if activation == "sigma":
        return np.array([Fraction(0) if x < 0 else (Fraction(1) if x > 1 else x) for x in v.flat],
                        dtype=object).reshape(v.shape)
    return v


class AffineLayer:
    """W x + b followed by the activation tag."""

    def __init__(self, weights, bias, activation: str = "none"):
        W = weights if isinstance(weights, np.ndarray) and weights.dtype == object else frac_matrix(weights)
        b = bias if isinstance(bias, np.ndarray) and bias.dtype == object else frac_vector(bias)
        if W.ndim != 2 or b.ndim != 1:
            raise ShapeError("weights must be a matrix and bias a vector")
        if W.shape[0] != b.shape[0]:
            raise ShapeError(f"{W.shape[0]} weight rows but {b.shape[0]} biases")
        if activation not in ACTIVATIONS:
            raise ActivationKindError(f"unknown activation {activation!r}")
        self.weights = W
        self.bias = b
        self.activation = activation
        self._rows = None

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    @property
    def sparse_rows(self) -> List[List[Tuple[int, Fraction]]]:
        """Nonzero (column, weight) pairs of each row."""
        if self._rows is None:
            self._rows = sparse_rows_of(self.weights)
        return self._rows

    def with_activation(self, activation: str) -> "AffineLayer":
        return AffineLayer(self.weights, self.bias, activation)

    def preactivation(self, x: Sequence[Fraction]) -> np.ndarray:
        out = np.empty(self.out_dim, dtype=object)
        for r, row in enumerate(self.sparse_rows):
            acc = self.bias[r]
            for c, w in row:
                acc = acc + w * x[c]
            out[r] = acc
        return out

    def __call__(self, x: Sequence[Fraction]) -> np.ndarray:
        return apply_activation(self.preactivation(x), self.activation)

    def __eq__(self, other):
        if not isinstance(other, AffineLayer):
            return NotImplemented
        return (self.activation == other.activation
                and self.weights.shape == other.weights.shape
                and bool(np.all(self.weights == other.weights))
                and bool(np.all(self.bias == other.bias)))

    def __repr__(self):
        rows = [[str(v) for v in row] for row in self.weights]
        return f"AffineLayer({rows}, {[str(v) for v in self.bias]}, {self.activation!r})"


class Network:
    def __init__(self, input_dim: int, layers: Sequence[AffineLayer]):
        if not layers:
            raise ShapeError("a network has at least one layer")
        dim = input_dim
        for i, layer in enumerate(layers):
            if layer.in_dim != dim:
                raise ShapeError(f"layer {i} expects {layer.in_dim} inputs, previous width is {dim}")
            dim = layer.out_dim
        self.input_dim = input_dim
        self.layers = list(layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def widths(self) -> List[int]:
        return [layer.out_dim for layer in self.layers]

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.input_dim == other.input_dim and self.layers == other.layers

    def __repr__(self):
        return f"Network(input_dim={self.input_dim}, widths={self.widths}, kind={network_kind(self)!r})"


def network_kind(net: Network) -> str:
    """'relu', 'sigma', 'affine' (no activation anywhere) or 'mixed'."""
    acts = {layer.activation for layer in net.layers} - {"none"}
    if not acts:
        return "affine"
    if len(acts) == 2:
        return "mixed"
    return acts.pop()


def eval_network(net: Network, x: Sequence[Fraction]) -> List[Fraction]:
    if len(x) != net.input_dim:
        raise ShapeError(f"network takes {net.input_dim} inputs, got {len(x)}")
    v = frac_vector(x)
    for layer in net.layers:
        v = layer(v)
    return [Fraction(y) for y in v]


def eval_network_batch(net: Network, points: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    """Row i of the result is eval_network(net, points[i])."""
    for p in points:
        if len(p) != net.input_dim:
            raise ShapeError(f"network takes {net.input_dim} inputs, got {len(p)}")
    out = []
    for p in points:
        v = [Fraction(x) for x in p]
        for layer in net.layers:
            v = layer(v)
        out.append([Fraction(y) for y in v])
    return out


# === Weight discipline ===
def is_integer(v: Fraction) -> bool:
    return Fraction(v).denominator == 1


def audit_weights(net: Network, k: Optional[int] = None, allow_rational_weights: bool = False) -> None:
    """
    Raise WeightDisciplineError naming the first non-integer weight or, when k
    is given, the first bias whose denominator does not divide k-1.
    """
    for li, layer in enumerate(net.layers):
        if not allow_rational_weights:
            for (r, c), w in np.ndenumerate(layer.weights):
                if not is_integer(w):
                    raise WeightDisciplineError(f"weight {w} is not an integer", layer=li, row=r, col=c)
        if k is not None:
            for r, b in enumerate(layer.bias):
                if (k - 1) % Fraction(b).denominator != 0:
                    raise WeightDisciplineError(f"bias {b} is not in Q_{k} (denominator must divide {k - 1})",
                                                layer=li, row=r)


def infer_k(net: Network) -> int:
    """Least k with every bias in Q_k: k-1 is the lcm of the bias denominators."""
    denom = 1
    for layer in net.layers:
        for b in layer.bias:
            d = Fraction(b).denominator
            denom = denom * d // math.gcd(denom, d)
    return max(denom, 1) + 1
