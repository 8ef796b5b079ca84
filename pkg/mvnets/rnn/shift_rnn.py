import logging
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

import numpy as np

from mvnets.cellular.neighborhood import StateSet
from mvnets.cellular.table import TransitionTable
from mvnets.compiler.table_compiler import DEFAULT_CAP, compile_boolean, compile_table
from mvnets.errors import PreconditionError, ShapeError
from mvnets.extract.conversion import sigma_to_relu
from mvnets.netcore.constructions import augment, eye, parallelize, zeros
from mvnets.netcore.network import AffineLayer, Network, eval_network, frac_vector, network_kind

logger = logging.getLogger(__name__)


def build_shift_network(n: int) -> Network:
    """(c[z], c[z-1], ..., c[z-n+1]) -> (c[z], ..., c[z-n+2]); the oldest value is dropped."""
    if n < 2:
        raise PreconditionError(f"the shift network needs n >= 2, got {n}")
    W1 = np.vstack([eye(n), -eye(n)])
    keep = np.hstack([eye(n - 1), zeros(n - 1, 1)])
    W2 = np.hstack([keep, -keep])
    return Network(n, [
        AffineLayer(W1, frac_vector([0] * 2 * n), "relu"),
        AffineLayer(W2, frac_vector([0] * (n - 1))),
    ])


class Rnn:
    """
    Single-layer recurrence (y[z]; h[z]) = Φ(x[z]; h[z-1]) with h[-1] = 0.

    phi_f reads the window (x[z], h[z-1]) = (c[z], c[z-1], ..., c[z-n+1]),
    phi_h keeps the last n-1 inputs, newest first.
    """

    def __init__(self, phi_f: Network, phi_h: Network, k: int):
        n = phi_f.input_dim
        if phi_f.output_dim != 1:
            raise ShapeError(f"phi_f must have a scalar output, got {phi_f.output_dim}")
        if phi_h.input_dim != n or phi_h.output_dim != n - 1:
            raise ShapeError(f"phi_h must map {n} inputs to {n - 1} outputs")
        self.phi_f = phi_f
        self.phi_h = phi_h
        self.k = k
        self.n = n
        depth = max(phi_f.depth, phi_h.depth)
        self.network = parallelize([augment(phi_f, depth), augment(phi_h, depth)])

    @property
    def hidden_dim(self) -> int:
        return self.n - 1

    @property
    def states(self) -> StateSet:
        return StateSet(self.k)

    def initial_hidden(self) -> List[Fraction]:
        return [Fraction(0)] * self.hidden_dim


def as_relu(net: Network) -> Network:
    kind = network_kind(net)
    if kind == "sigma":
        return sigma_to_relu(net)
    if kind == "mixed":
        raise PreconditionError("phi_f mixes ρ and σ layers")
    return net


def build_rnn(table_or_net: Union[TransitionTable, Network], n: int, k: int, cap: int = DEFAULT_CAP) -> Rnn:
    """
    Recurrent realization of a 1D rule on the contiguous offsets
    {0, -1, ..., -n+1}. Tables are compiled (Boolean path for k=2);
    networks are used as phi_f directly.
    """
    if n < 2:
        raise PreconditionError(f"the recurrent form needs n >= 2, got {n}")
    if isinstance(table_or_net, TransitionTable):
        table = table_or_net
        if table.n != n or table.k != k:
            raise ShapeError(f"table has k={table.k}, n={table.n}; expected k={k}, n={n}")
        if table.neighborhood is not None and not table.neighborhood.is_contiguous():
            raise PreconditionError(
                f"offsets {table.neighborhood.format()} are not contiguous; normalize the neighborhood first")
        phi_f = compile_boolean(table) if k == 2 else compile_table(table, cap)
    else:
        phi_f = as_relu(table_or_net)
        if phi_f.input_dim != n:
            raise ShapeError(f"network takes {phi_f.input_dim} inputs; expected {n}")
    rnn = Rnn(phi_f, build_shift_network(n), k)
    logger.debug(f"assembled recurrent network: depth {rnn.network.depth}, widths {rnn.network.widths}")
    return rnn


def rnn_step(rnn: Rnn, x: Fraction, h: Sequence[Fraction]) -> Tuple[Fraction, List[Fraction]]:
    """One update of the assembled network: returns (y[z], h[z])."""
    if len(h) != rnn.hidden_dim:
        raise ShapeError(f"hidden state has {len(h)} entries, expected {rnn.hidden_dim}")
    out = eval_network(rnn.network, [Fraction(x)] + [Fraction(v) for v in h])
    return out[0], out[1:]


def rnn_evolve(rnn: Rnn, sequence: Sequence[int]) -> List[int]:
    """Stream state indices through the recurrence from the zero hidden state."""
    states = rnn.states
    h = rnn.initial_hidden()
    out = []
    for s in sequence:
        y, h = rnn_step(rnn, states.value(s), h)
        out.append(states.index(y))
    return out


def rnn_evolve_aligned(rnn: Rnn, sequence: Sequence[int], shift: int) -> List[int]:
    """
    Output aligned with a zero-boundary step on the original offsets, where
    `shift` is the one normalize_neighborhood returned.
    """
    if shift < 0:
        raise PreconditionError(f"shift must be >= 0, got {shift}")
    out = rnn_evolve(rnn, list(sequence) + [0] * shift)
    return out[shift:]


if __name__ == "__main__":
    # 簡単な動作確認
    logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
    shift_net = build_shift_network(3)
    print(eval_network(shift_net, [Fraction(1), Fraction(1, 2), Fraction(1, 3)]))
    and_rnn = build_rnn(TransitionTable(2, 2, [0, 0, 0, 1]), 2, 2)
    print(rnn_evolve(and_rnn, [1, 1, 0, 1, 1, 1]))
