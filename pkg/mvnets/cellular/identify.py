import logging
from fractions import Fraction
from typing import List, NamedTuple, Tuple

import numpy as np

from mvnets.cellular.dynamics import Trace, window_indices
from mvnets.cellular.table import TransitionTable, decode_index
from mvnets.errors import InconsistentTraceError, PreconditionError

logger = logging.getLogger(__name__)


class Identification(NamedTuple):
    table: TransitionTable
    coverage: Fraction
    missing: List[Tuple[int, ...]]

    @property
    def complete(self) -> bool:
        return not self.missing


def identify(trace: Trace) -> Identification:
    """
    Recover the transition table from consecutive configurations.

    Every (window -> next state) pair of every step fills one entry. Entries
    never observed stay 0 and are listed in `missing`.
    """
    if len(trace) < 2:
        raise PreconditionError("identification needs at least two configurations")
    k, nbhd = trace.k, trace.neighborhood
    size = k ** nbhd.n
    # -1 は未観測
    observed = np.full(size, -1, dtype=np.int64)
    seen_at = {}

    for t in range(len(trace) - 1):
        windows = window_indices(k, nbhd, trace[t]).reshape(-1)
        nxt = trace[t + 1].cells.reshape(-1)
        flat_cells = list(np.ndindex(trace[t].shape))
        for pos, (w, y) in enumerate(zip(windows.tolist(), nxt.tolist())):
            known = observed[w]
            if known == -1:
                observed[w] = y
                seen_at[w] = (t, flat_cells[pos])
            elif known != y:
                raise InconsistentTraceError(
                    time=t, cell=flat_cells[pos], window=decode_index(w, k, nbhd.n),
                    first=int(known), second=int(y), first_seen=seen_at[w],
                )

    missing = [decode_index(i, k, nbhd.n) for i in np.flatnonzero(observed < 0).tolist()]
    coverage = Fraction(size - len(missing), size)
    table = TransitionTable(k, nbhd.n, np.where(observed < 0, 0, observed), nbhd)
    logger.info(f"identified k={k}, n={nbhd.n} table with coverage {coverage}")
    return Identification(table, coverage, missing)
