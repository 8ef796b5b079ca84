from dataclasses import dataclass
from typing import Optional

from mvnets.cellular.dynamics import BOUNDARIES
from mvnets.cellular.neighborhood import Neighborhood, parse_offsets
from mvnets.compiler.table_compiler import DEFAULT_CAP
from mvnets.errors import PreconditionError

PATHS = ("auto", "dnf", "simplex")


@dataclass(frozen=True)
class PipelineConfig:
    """Settings shared by every pipeline command."""
    k: Optional[int] = None
    d: int = 1
    offsets: Optional[Neighborhood] = None
    boundary: Optional[str] = None
    cap: int = DEFAULT_CAP
    grid: int = 5
    seed: Optional[int] = None
    shared: bool = False
    path: str = "auto"
    verbose: bool = False
    output: Optional[str] = None

    def __post_init__(self):
        if self.k is not None and self.k < 2:
            raise PreconditionError(f"--k must be >= 2, got {self.k}")
        if self.cap < 1:
            raise PreconditionError(f"--cap must be >= 1, got {self.cap}")
        if self.grid < 2:
            raise PreconditionError(f"--grid must be >= 2, got {self.grid}")
        if self.boundary is not None and self.boundary not in BOUNDARIES:
            raise PreconditionError(f"--boundary must be one of {BOUNDARIES}")
        if self.path not in PATHS:
            raise PreconditionError(f"--path must be one of {PATHS}")
        if self.offsets is not None and self.offsets.d != self.d:
            raise PreconditionError(f"offsets are {self.offsets.d}D but d={self.d}")

    @classmethod
    def from_args(cls, args) -> "PipelineConfig":
        offsets = parse_offsets(args.offsets) if getattr(args, "offsets", None) else None
        return cls(
            k=args.k,
            d=offsets.d if offsets is not None else 1,
            offsets=offsets,
            boundary=args.boundary,
            cap=args.cap,
            grid=args.grid,
            seed=args.seed,
            shared=args.shared,
            path=args.path,
            verbose=args.verbose,
            output=getattr(args, "output", None),
        )

    def require_k(self) -> int:
        if self.k is None:
            raise PreconditionError("this command needs --k")
        return self.k
