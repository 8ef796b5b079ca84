import itertools
import random
from fractions import Fraction
from typing import List

import pytest

from mvnets.cellular.table import TransitionTable, elementary_table
from mvnets.netcore.network import AffineLayer, Network

F = Fraction

RULE30_ENTRIES = [0, 1, 1, 1, 1, 0, 0, 0]
RULE110_ENTRIES = [0, 1, 1, 1, 0, 1, 1, 0]

# (k, n) pairs small enough for the interpolation path in tests
SMALL_SHAPES = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3), (4, 1), (4, 2), (4, 3)]


def clamp(v: Fraction) -> Fraction:
    return min(F(1), max(F(0), v))


def random_point(rng: random.Random, n: int, denom: int = 12) -> List[Fraction]:
    return [F(rng.randint(0, denom), denom) for _ in range(n)]


def binary_inputs(n: int):
    return list(itertools.product((0, 1), repeat=n))


def random_network(rng: random.Random, widths: List[int], activation: str = "relu", output: str = "none",
                   bias_denom: int = 1) -> Network:
    """Integer weights in [-2, 2], biases in [-2, 2] with denominator bias_denom."""
    layers = []
    for li in range(1, len(widths)):
        W = [[rng.randint(-2, 2) for _ in range(widths[li - 1])] for _ in range(widths[li])]
        b = [F(rng.randint(-2 * bias_denom, 2 * bias_denom), bias_denom) for _ in range(widths[li])]
        layers.append(AffineLayer(W, b, activation if li < len(widths) - 1 else output))
    return Network(widths[0], layers)


@pytest.fixture
def rule30() -> TransitionTable:
    return elementary_table(30)


@pytest.fixture
def golden_f30() -> Network:
    """Hand-built three-layer rule-30 network."""
    W1 = [[1, -1, -1], [-1, 0, 1], [-1, 1, 0]]
    return Network(3, [
        AffineLayer(W1, [0, 0, 0], "relu"),
        AffineLayer([[1, 1, 1], [1, 1, 1]], [0, -1], "relu"),
        AffineLayer([[1, -1]], [0]),
    ])


@pytest.fixture
def totalistic_net() -> Network:
    """ρ(Σx) - ρ(Σx - 1) over three inputs."""
    return Network(3, [
        AffineLayer([[1, 1, 1], [1, 1, 1]], [0, -1], "relu"),
        AffineLayer([[1, -1]], [0]),
    ])


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240607)
