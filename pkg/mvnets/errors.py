"""
Exception hierarchy. Every class carries the exit code the CLI returns for it.
"""


class MvNetsError(Exception):
    exit_code: int = 1


# === 1. Precondition / format errors (exit 3) ===
class PreconditionError(MvNetsError):
    exit_code = 3


class TermSyntaxError(PreconditionError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnboundVariableError(PreconditionError):
    pass


class DomainError(PreconditionError):
    pass


class ShapeError(PreconditionError):
    pass


class IncompleteTableError(PreconditionError):
    pass


class InconsistentTraceError(PreconditionError):
    def __init__(self, time: int, cell: tuple, window: tuple, first: int, second: int, first_seen=None):
        where = f"time {time}, cell {cell}"
        if first_seen is not None:
            where += f"; first seen at time {first_seen[0]}, cell {first_seen[1]}"
        super().__init__(f"window {window} maps to {first} and to {second} ({where})")
        self.time = time
        self.cell = cell
        self.window = window
        self.first = first
        self.second = second


class WeightDisciplineError(PreconditionError):
    def __init__(self, message: str, layer: int, row: int, col: int = None):
        where = f"layer {layer}, row {row}" + (f", col {col}" if col is not None else "")
        super().__init__(f"{message} ({where})")
        self.layer = layer
        self.row = row
        self.col = col


class ActivationKindError(PreconditionError):
    pass


class RangeError(PreconditionError):
    pass


# === 2. Cap (exit 4) / mismatch (exit 2) ===
class CapExceededError(MvNetsError):
    exit_code = 4


class VerificationMismatch(MvNetsError):
    exit_code = 2
