import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np

from mvnets.cellular.neighborhood import Neighborhood
from mvnets.cellular.table import TransitionTable
from mvnets.errors import DomainError, PreconditionError, ShapeError

logger = logging.getLogger(__name__)

BOUNDARIES = ("zero", "periodic")


class Configuration:
    """Finite line or grid of state indices with a boundary policy for reads outside it."""

    def __init__(self, cells, boundary: str = "zero"):
        arr = np.array(cells, dtype=np.int64)
        if arr.ndim not in (1, 2):
            raise ShapeError(f"configurations are 1D or 2D, got ndim={arr.ndim}")
        if boundary not in BOUNDARIES:
            raise PreconditionError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")
        if arr.size and arr.min() < 0:
            raise DomainError("state indices must be non-negative")
        arr.setflags(write=False)
        self.cells = arr
        self.boundary = boundary

    @property
    def d(self) -> int:
        return self.cells.ndim

    @property
    def shape(self):
        return self.cells.shape

    def check_states(self, k: int) -> None:
        if self.cells.size and self.cells.max() >= k:
            raise DomainError(f"configuration holds state {self.cells.max()} but k={k}")

    def tolist(self):
        return self.cells.tolist()

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.boundary == other.boundary and np.array_equal(self.cells, other.cells)

    def __repr__(self):
        return f"Configuration({self.cells.tolist()}, boundary={self.boundary!r})"


@dataclass
class Trace:
    k: int
    neighborhood: Neighborhood
    configs: List[Configuration] = field(default_factory=list)
    boundary: str = "zero"

    def __post_init__(self):
        if not self.configs:
            raise PreconditionError("a trace holds at least one configuration")
        shape = self.configs[0].shape
        for t, c in enumerate(self.configs):
            if c.shape != shape:
                raise ShapeError(f"configuration {t} has shape {c.shape}, expected {shape}")
            if c.d != self.neighborhood.d:
                raise ShapeError(f"configuration {t} is {c.d}D but the neighborhood is {self.neighborhood.d}D")
            c.check_states(self.k)

    def __len__(self):
        return len(self.configs)

    def __getitem__(self, t: int) -> Configuration:
        return self.configs[t]


# === 1. Global map ===
def neighbor_view(cells: np.ndarray, offset: Sequence[int], boundary: str) -> np.ndarray:
    """Array A with A[z] = cells[z + offset] under the boundary policy."""
    if boundary == "periodic":
        return np.roll(cells, shift=tuple(-o for o in offset), axis=tuple(range(cells.ndim)))
    pad = max(abs(o) for o in offset)
    if pad == 0:
        return cells
    padded = np.pad(cells, pad)
    index = tuple(slice(pad + o, pad + o + size) for o, size in zip(offset, cells.shape))
    return padded[index]


def window_indices(table_k: int, nbhd: Neighborhood, c: Configuration) -> np.ndarray:
    """Base-k code of every cell's neighborhood window."""
    idx = np.zeros(c.shape, dtype=np.int64)
    for offset in nbhd.offsets:
        idx = idx * table_k + neighbor_view(c.cells, offset, c.boundary)
    return idx


def apply_map(table: TransitionTable, nbhd: Neighborhood, c: Configuration) -> Configuration:
    """out[z] = f(c[z + o_0], ..., c[z + o_{n-1}])."""
    if table.n != nbhd.n:
        raise ShapeError(f"table arity {table.n} does not match {nbhd.n} offsets")
    if c.d != nbhd.d:
        raise ShapeError(f"{c.d}D configuration with a {nbhd.d}D neighborhood")
    c.check_states(table.k)
    return Configuration(table.entries[window_indices(table.k, nbhd, c)], c.boundary)


def evolve(table: TransitionTable, nbhd: Neighborhood, c0: Configuration, steps: int,
           progress: Optional[Callable[[Iterable[int]], Iterable[int]]] = None) -> Trace:
    """c0 and its first `steps` images; `progress` may wrap the step range (e.g. tqdm)."""
    if steps < 0:
        raise PreconditionError(f"steps must be >= 0, got {steps}")
    configs = [c0]
    for _ in (progress or iter)(range(steps)):
        configs.append(apply_map(table, nbhd, configs[-1]))
    logger.debug(f"evolved {c0.shape} configuration for {steps} steps")
    return Trace(table.k, nbhd, configs, c0.boundary)


# === 2. Seeds ===
def de_bruijn_sequence(k: int, span: int) -> List[int]:
    """Cyclic sequence of length k**span holding every word of length span once."""
    a = [0] * (k * span)
    seq: List[int] = []

    def db(t: int, p: int):
        if t > span:
            if span % p == 0:
                seq.extend(a[1:p + 1])
        else:
            a[t] = a[t - p]
            db(t + 1, p)
            for j in range(a[t - p] + 1, k):
                a[t] = j
                db(t + 1, t)

    db(1, 1)
    return seq


def de_bruijn_config(k: int, span: int) -> Configuration:
    """Periodic line in which every window of `span` consecutive cells occurs."""
    if span < 1:
        raise PreconditionError(f"span must be >= 1, got {span}")
    return Configuration(de_bruijn_sequence(k, span), boundary="periodic")


def single_cell_config(width: int, state: int = 1, boundary: str = "zero") -> Configuration:
    cells = np.zeros(width, dtype=np.int64)
    cells[width // 2] = state
    return Configuration(cells, boundary)
