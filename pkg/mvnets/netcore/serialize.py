import json
import re
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from mvnets.errors import PreconditionError
from mvnets.ioutil import atomic_write, read_text
from mvnets.netcore.network import AffineLayer, Network, frac_matrix, frac_vector

RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def rational_to_str(v) -> str:
    return str(Fraction(v))


def str_to_rational(text: str) -> Fraction:
    if not isinstance(text, str) or not RATIONAL_RE.match(text.strip()):
        raise PreconditionError(f"expected an exact rational string 'p' or 'p/q', got {text!r}")
    return Fraction(text.strip())


def network_to_dict(net: Network, variables: Optional[Sequence[int]] = None) -> Dict[str, Any]:
    """JSON-ready document; every number is an exact 'p' or 'p/q' string."""
    doc: Dict[str, Any] = {"input_dim": net.input_dim}
    if variables is not None:
        doc["variables"] = [int(v) for v in variables]
    doc["layers"] = [
        {
            "weights": [[rational_to_str(w) for w in row] for row in layer.weights],
            "bias": [rational_to_str(b) for b in layer.bias],
            "activation": layer.activation,
        }
        for layer in net.layers
    ]
    return doc


def network_from_dict(data: Dict[str, Any]) -> Network:
    try:
        input_dim = int(data["input_dim"])
        layers = []
        dim = input_dim
        for entry in data["layers"]:
            W = frac_matrix([[str_to_rational(w) for w in row] for row in entry["weights"]], dim)
            b = frac_vector(str_to_rational(v) for v in entry["bias"])
            layers.append(AffineLayer(W, b, entry.get("activation", "none")))
            dim = W.shape[0]
    except (KeyError, TypeError) as e:
        raise PreconditionError(f"malformed network document: {e}")
    return Network(input_dim, layers)


def variables_from_dict(data: Dict[str, Any]) -> Optional[List[int]]:
    if "variables" not in data:
        return None
    variables = [int(v) for v in data["variables"]]
    if len(variables) != int(data["input_dim"]):
        raise PreconditionError(f"{len(variables)} variables for {data['input_dim']} inputs")
    return variables


def dumps_network(net: Network, variables: Optional[Sequence[int]] = None) -> str:
    return json.dumps(network_to_dict(net, variables), ensure_ascii=False, indent=4) + "\n"


def parse_document(text: str) -> Dict[str, Any]:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise PreconditionError(f"network file is not valid JSON: {e}")


def loads_network(text: str) -> Network:
    return network_from_dict(parse_document(text))


def save_network(path: str, net: Network, variables: Optional[Sequence[int]] = None) -> None:
    atomic_write(path, dumps_network(net, variables))


def load_network(path: str) -> Network:
    return loads_network(read_text(path))


def load_network_document(path: str) -> Tuple[Network, Optional[List[int]]]:
    """Network plus the term variable of each input, when the file records them."""
    data = parse_document(read_text(path))
    return network_from_dict(data), variables_from_dict(data)
