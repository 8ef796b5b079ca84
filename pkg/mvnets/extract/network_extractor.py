import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from mvnets.errors import ActivationKindError, RangeError, ShapeError
from mvnets.extract.conversion import relu_to_sigma
from mvnets.extract.neuron import NeuronExtractor
from mvnets.mvlogic.semantics import as_valuations, eval_term_batch, lattice_points, unit_grid
from mvnets.mvlogic.terms import DmvTerm, Var, term_size
from mvnets.netcore.bounds import outputs_within
from mvnets.netcore.constructions import fold_affine_layers, merge_duplicate_neurons
from mvnets.netcore.network import Network, audit_weights, eval_network_batch, infer_k, network_kind

logger = logging.getLogger(__name__)


def to_sigma_network(net: Network, k: int) -> Network:
    """
    σ-network equal to net on [0,1]^n whose last layer is σ-tagged. Untagged
    hidden layers are folded into the next layer first; every remaining layer
    is then one σ-neuron per row.
    """
    kind = network_kind(net)
    if kind == "mixed":
        raise ActivationKindError("cannot extract from a network mixing ρ and σ layers")
    audit_weights(net, k)
    net = fold_affine_layers(net)
    if kind in ("relu", "affine"):
        net = relu_to_sigma(net, k)
    net = merge_duplicate_neurons(net)
    if not outputs_within(net, Fraction(0), Fraction(1)):
        raise RangeError("network output is not provably within [0,1]; σ cannot be applied at the output")
    layers = net.layers[:-1] + [net.layers[-1].with_activation("sigma")]
    return Network(net.input_dim, layers)


def extract_network(net: Network, k: Optional[int] = None, variables: Optional[Sequence[int]] = None) -> DmvTerm:
    """DMV term whose function equals the network on [0,1]^n."""
    if net.output_dim != 1:
        raise ShapeError(f"extraction needs a scalar output, network has {net.output_dim}")
    if k is None:
        k = infer_k(net)
        logger.info(f"inferred k={k} from the bias denominators")
    variables = list(variables) if variables is not None else list(range(net.input_dim))
    if len(variables) != net.input_dim:
        raise ShapeError(f"{len(variables)} variables for {net.input_dim} network inputs")

    sigma_net = to_sigma_network(net, k)
    terms: List[DmvTerm] = [Var(v) for v in variables]
    for layer in sigma_net.layers:
        extractor = NeuronExtractor(terms, k)
        terms = [extractor.extract_row(row, layer.bias[r]) for r, row in enumerate(layer.sparse_rows)]
    term = terms[0]
    logger.info(f"extracted term with {term_size(term)} distinct nodes from widths {sigma_net.widths}")
    return term


@dataclass
class VerificationReport:
    equal: bool
    checked: int
    first_mismatch: Optional[Tuple[Tuple[Fraction, ...], Fraction, Fraction]] = None

    def describe(self) -> str:
        if self.equal:
            return f"equal on all {self.checked} points"
        point, a, b = self.first_mismatch
        shown = ", ".join(str(v) for v in point)
        return f"first mismatch at ({shown}): network {a} vs term {b}"


def verification_points(n: int, k: int, grid_density: int) -> List[Tuple[Fraction, ...]]:
    return list(dict.fromkeys(unit_grid(n, grid_density) + lattice_points(n, k)))


def verify_extraction(net: Network, term: DmvTerm, k: int, grid_density: int = 5,
                      variables: Optional[Sequence[int]] = None) -> VerificationReport:
    """Exact comparison on the uniform grid plus every lattice point of K^n."""
    n = net.input_dim
    variables = list(variables) if variables is not None else list(range(n))
    points = verification_points(n, k, grid_density)
    net_values = [row[0] for row in eval_network_batch(net, points)]
    term_values = eval_term_batch(term, as_valuations(points, variables))
    for point, a, b in zip(points, net_values, term_values):
        if a != b:
            return VerificationReport(False, len(points), (point, a, b))
    return VerificationReport(True, len(points))
