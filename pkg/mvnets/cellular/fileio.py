import logging
from typing import Dict, List, Optional

from mvnets.cellular.dynamics import Configuration, Trace
from mvnets.cellular.neighborhood import Neighborhood, contiguous_neighborhood, parse_offsets
from mvnets.cellular.table import TransitionTable, encode_tuple
from mvnets.errors import PreconditionError
from mvnets.ioutil import atomic_write, read_text

logger = logging.getLogger(__name__)


def parse_header(line: str, kind: str) -> Dict[str, str]:
    """`# <kind> key=value ...` -> {key: value}."""
    parts = line.strip().split()
    if len(parts) < 2 or parts[0] != "#" or parts[1] != kind:
        raise PreconditionError(f"expected a '# {kind} ...' header, got {line.strip()!r}")
    fields = {}
    for part in parts[2:]:
        if "=" not in part:
            raise PreconditionError(f"malformed header field {part!r}")
        key, value = part.split("=", 1)
        fields[key] = value
    return fields


def require_int(fields: Dict[str, str], key: str) -> int:
    if key not in fields:
        raise PreconditionError(f"header lacks {key}=")
    try:
        return int(fields[key])
    except ValueError:
        raise PreconditionError(f"header field {key}={fields[key]!r} is not an integer")


# === 1. Table files ===
def format_table(table: TransitionTable) -> str:
    header = f"# table k={table.k} n={table.n}"
    if table.neighborhood is not None:
        header += f" offsets={table.neighborhood.format()}"
    lines = [header]
    for xs, out in table.items():
        lines.append(" ".join(str(x) for x in xs) + f" -> {out}")
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> TransitionTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise PreconditionError("empty table file")
    fields = parse_header(lines[0], "table")
    k, n = require_int(fields, "k"), require_int(fields, "n")
    nbhd: Optional[Neighborhood] = parse_offsets(fields["offsets"]) if "offsets" in fields else None
    entries: List[Optional[int]] = [None] * (k ** n)
    for lineno, line in enumerate(lines[1:], start=2):
        if "->" not in line:
            raise PreconditionError(f"line {lineno}: expected 'i1 ... in -> out'")
        lhs, rhs = line.split("->", 1)
        try:
            xs = [int(tok) for tok in lhs.split()]
            out = int(rhs.strip())
        except ValueError:
            raise PreconditionError(f"line {lineno}: non-integer state")
        if len(xs) != n or any(not 0 <= x < k for x in xs):
            raise PreconditionError(f"line {lineno}: input {xs} is not in K^{n} for k={k}")
        idx = encode_tuple(xs, k)
        if entries[idx] is not None and entries[idx] != out:
            raise PreconditionError(f"line {lineno}: input {xs} given twice with different outputs")
        entries[idx] = out
    if any(e is None for e in entries):
        missing = sum(1 for e in entries if e is None)
        raise PreconditionError(f"table file lists {k ** n - missing} of {k ** n} entries")
    return TransitionTable(k, n, entries, nbhd)


def write_table(path: str, table: TransitionTable) -> None:
    atomic_write(path, format_table(table))


def read_table(path: str) -> TransitionTable:
    return parse_table(read_text(path))


# === 2. Trace files ===
def format_trace(trace: Trace) -> str:
    nbhd = trace.neighborhood
    header = f"# ca k={trace.k} d={nbhd.d} offsets={nbhd.format()} boundary={trace.boundary}"
    blocks = []
    for c in trace.configs:
        rows = [c.tolist()] if c.d == 1 else c.tolist()
        blocks.append("\n".join(" ".join(str(s) for s in row) for row in rows))
    return header + "\n" + "\n\n".join(blocks) + "\n"


def parse_trace(text: str, default_offsets: Optional[Neighborhood] = None) -> Trace:
    lines = text.splitlines()
    if not lines:
        raise PreconditionError("empty trace file")
    fields = parse_header(lines[0], "ca")
    k, d = require_int(fields, "k"), require_int(fields, "d")
    boundary = fields.get("boundary", "zero")
    blocks: List[List[List[int]]] = [[]]
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            if blocks[-1]:
                blocks.append([])
            continue
        try:
            blocks[-1].append([int(tok) for tok in line.split()])
        except ValueError:
            raise PreconditionError(f"line {lineno}: non-integer cell")
    blocks = [b for b in blocks if b]
    if not blocks:
        raise PreconditionError("trace file holds no configuration")
    if "offsets" in fields:
        nbhd = parse_offsets(fields["offsets"])
    elif default_offsets is not None:
        nbhd = default_offsets
    else:
        nbhd = contiguous_neighborhood(1)
    if nbhd.d != d:
        raise PreconditionError(f"header says d={d} but offsets are {nbhd.d}D")
    configs = []
    for block in blocks:
        if d == 1:
            if len(block) != 1:
                raise PreconditionError("a 1D configuration occupies one line")
            configs.append(Configuration(block[0], boundary))
        else:
            configs.append(Configuration(block, boundary))
    return Trace(k, nbhd, configs, boundary)


def write_trace(path: str, trace: Trace) -> None:
    atomic_write(path, format_trace(trace))


def read_trace(path: str, default_offsets: Optional[Neighborhood] = None) -> Trace:
    return parse_trace(read_text(path), default_offsets)


def parse_configuration(text: str, boundary: Optional[str] = None) -> Configuration:
    """
    A single configuration: either a trace file (its first configuration) or
    bare rows of state indices, one row for a line, several for a grid.
    """
    stripped = text.lstrip()
    if stripped.startswith("#"):
        first = parse_trace(text)[0]
        return Configuration(first.cells, boundary or first.boundary)
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([int(tok) for tok in line.split()])
        except ValueError:
            raise PreconditionError(f"line {lineno}: non-integer cell")
    if not rows:
        return Configuration([], boundary or "zero")
    return Configuration(rows[0] if len(rows) == 1 else rows, boundary or "zero")


def read_configuration(path: str, boundary: Optional[str] = None) -> Configuration:
    return parse_configuration(read_text(path), boundary)
