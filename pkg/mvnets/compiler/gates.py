"""
Small fixed networks: n-ary ⊕ / ⊙, the affine ¬ and δᵢ layers and the
2-ary min and max gadgets.
"""
from fractions import Fraction

from mvnets.errors import PreconditionError
from mvnets.netcore.constructions import affine_network
from mvnets.netcore.network import AffineLayer, Network


def gate_oplus_n(n: int) -> Network:
    """min(1, Σx) = ρ(Σx) - ρ(Σx - 1) on [0,1]^n."""
    if n < 1:
        raise PreconditionError(f"gate arity must be >= 1, got {n}")
    hidden = AffineLayer([[1] * n, [1] * n], [0, -1], "relu")
    return Network(n, [hidden, AffineLayer([[1, -1]], [0])])


def gate_odot_n(n: int) -> Network:
    """max(0, Σx - (n-1)) = ρ(Σx - (n-1)) on [0,1]^n."""
    if n < 1:
        raise PreconditionError(f"gate arity must be >= 1, got {n}")
    hidden = AffineLayer([[1] * n], [-(n - 1)], "relu")
    return Network(n, [hidden, AffineLayer([[1]], [0])])


def not_gate() -> Network:
    return affine_network([[-1]], [1])


def delta_gate(i: int) -> Network:
    if i < 1:
        raise PreconditionError(f"delta index must be >= 1, got {i}")
    return affine_network([[Fraction(1, i)]], [0])


def min_gadget() -> Network:
    """min(a, b) = ρ(a) - ρ(-a) - ρ(a - b)."""
    hidden = AffineLayer([[1, 0], [-1, 0], [1, -1]], [0, 0, 0], "relu")
    return Network(2, [hidden, AffineLayer([[1, -1, -1]], [0])])


def max_gadget() -> Network:
    """max(a, b) = ρ(a) - ρ(-a) + ρ(b - a)."""
    hidden = AffineLayer([[1, 0], [-1, 0], [-1, 1]], [0, 0, 0], "relu")
    return Network(2, [hidden, AffineLayer([[1, -1, 1]], [0])])
