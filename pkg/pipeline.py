import argparse
import logging
import random
import sys
from typing import List, Optional, Sequence

from tqdm import tqdm

from mvnets.cellular.dynamics import Configuration, Trace, de_bruijn_config, evolve
from mvnets.cellular.fileio import format_table, format_trace, parse_table, read_configuration, read_trace
from mvnets.cellular.identify import identify
from mvnets.cellular.neighborhood import (Neighborhood, NormalizedNeighborhood, StateSet, contiguous_neighborhood,
                                          normalize_neighborhood)
from mvnets.cellular.table import TransitionTable, elementary_table, game_of_life_table, random_table
from mvnets.compiler.table_compiler import DEFAULT_CAP, compile_boolean, compile_table
from mvnets.compiler.term_compiler import compile_term
from mvnets.config import PATHS, PipelineConfig
from mvnets.errors import MvNetsError, PreconditionError, VerificationMismatch, WeightDisciplineError
from mvnets.extract.network_extractor import extract_network, verify_extraction
from mvnets.ioutil import atomic_write, read_text
from mvnets.mvlogic.parser import parse_program
from mvnets.mvlogic.printer import print_term
from mvnets.mvlogic.semantics import as_valuations, eval_term_batch, lattice_points
from mvnets.mvlogic.tables import table_from_term, table_variables
from mvnets.mvlogic.terms import DmvTerm, term_variables
from mvnets.netcore.network import Network, eval_network_batch, infer_k
from mvnets.netcore.serialize import dumps_network, load_network_document
from mvnets.rnn.shift_rnn import build_rnn, rnn_evolve_aligned

logger = logging.getLogger("pipeline")


# === 1. Helpers ===
def emit(text: str, path: Optional[str]) -> None:
    """Write atomically to path, or to stdout when no path is given."""
    if path:
        atomic_write(path, text)
        logger.info(f"wrote {path}")
    else:
        sys.stdout.write(text)


def is_table_text(text: str) -> bool:
    return text.lstrip().startswith("# table")


def read_term(path: str) -> DmvTerm:
    return parse_program(read_text(path))


def term_table_variables(term: DmvTerm, cfg: PipelineConfig) -> List[int]:
    if cfg.offsets is not None:
        return cfg.offsets.variables()
    return term_variables(term)


def table_neighborhood(table: TransitionTable, cfg: PipelineConfig) -> Neighborhood:
    if cfg.offsets is not None:
        if cfg.offsets.n != table.n:
            raise PreconditionError(f"--offsets has {cfg.offsets.n} entries but the table arity is {table.n}")
        return cfg.offsets
    if table.neighborhood is not None:
        return table.neighborhood
    return contiguous_neighborhood(table.n)


def network_table_mismatch(net: Network, table: TransitionTable) -> Optional[str]:
    """Compare a network with a table on every point of K^n."""
    states = StateSet(table.k)
    points = lattice_points(table.n, table.k)
    values = eval_network_batch(net, points)
    for xs, point, value in zip(table.inputs(), points, values):
        expected = states.value(table.lookup(xs))
        if value != [expected]:
            shown = ", ".join(str(p) for p in point)
            return f"network gives {', '.join(str(v) for v in value)} at ({shown}), table gives {expected}"
    return None


def term_table_mismatch(term: DmvTerm, table: TransitionTable, variables: Sequence[int]) -> Optional[str]:
    states = StateSet(table.k)
    points = lattice_points(table.n, table.k)
    values = eval_term_batch(term, as_valuations(points, variables))
    for xs, point, value in zip(table.inputs(), points, values):
        expected = states.value(table.lookup(xs))
        if value != expected:
            shown = ", ".join(str(p) for p in point)
            return f"term gives {value} at ({shown}), table gives {expected}"
    return None


def compile_for_path(table: TransitionTable, cfg: PipelineConfig) -> Network:
    path = cfg.path
    if path == "auto":
        path = "dnf" if table.k == 2 else "simplex"
    logger.info(f"compiling k={table.k}, n={table.n} table on the {path} path")
    if path == "dnf":
        return compile_boolean(table)
    return compile_table(table, cfg.cap)


# === 2. Commands ===
def cmd_gen(args, cfg: PipelineConfig) -> int:
    if args.term:
        k = cfg.require_k()
        term = read_term(args.term)
        variables = term_table_variables(term, cfg)
        table = table_from_term(term, k, variables)
        if cfg.offsets is not None:
            table = table.with_neighborhood(cfg.offsets)
        elif 0 in variables:
            table = table.with_neighborhood(Neighborhood.line(variables))
    elif args.rule == "life":
        table = game_of_life_table()
    elif args.rule == "random":
        k = cfg.require_k()
        if cfg.seed is None:
            raise PreconditionError("gen random needs --seed")
        nbhd = cfg.offsets if cfg.offsets is not None else contiguous_neighborhood(args.n or 3)
        table = random_table(k, nbhd.n, random.Random(cfg.seed), nbhd)
    elif args.rule is not None:
        try:
            index = int(args.rule)
        except ValueError:
            raise PreconditionError(f"unknown rule {args.rule!r}; expected 0..255, 'life' or 'random'")
        table = elementary_table(index)
    else:
        raise PreconditionError("gen needs a rule or --term")
    logger.info(f"generated k={table.k}, n={table.n} table ({table.k ** table.n} entries)")
    emit(format_table(table), cfg.output)
    return 0


def cmd_evolve(args, cfg: PipelineConfig) -> int:
    table = parse_table(read_text(args.table))
    nbhd = table_neighborhood(table, cfg)
    c0 = read_configuration(args.config, cfg.boundary)
    trace = evolve(table, nbhd, c0, args.steps, progress=lambda steps: tqdm(steps, desc="evolve", leave=False))
    emit(format_trace(trace), cfg.output)
    return 0


def cmd_identify(args, cfg: PipelineConfig) -> int:
    trace = read_trace(args.trace, default_offsets=cfg.offsets)
    result = identify(trace)
    print(f"coverage {result.coverage}")
    if result.missing:
        logger.warning(f"{len(result.missing)} inputs never observed; their entries are set to 0")
    emit(format_table(result.table), cfg.output)
    return 0


def cmd_compile(args, cfg: PipelineConfig) -> int:
    text = read_text(args.source)
    if is_table_text(text):
        table = parse_table(text)
        net = compile_for_path(table, cfg)
        variables = table_variables(table)
    else:
        term = parse_program(text)
        variables = term_table_variables(term, cfg)
        net = compile_term(term, variables)
    logger.info(f"network depth {net.depth}, widths {net.widths}")
    emit(dumps_network(net, variables), cfg.output)
    return 0


def cmd_extract(args, cfg: PipelineConfig) -> int:
    net, variables = load_network_document(args.network)
    if cfg.offsets is not None:
        variables = cfg.offsets.variables()
    k = cfg.k
    if k is None:
        k = infer_k(net)
        logger.info(f"no --k given; inferred k={k}")
    try:
        term = extract_network(net, k, variables)
    except WeightDisciplineError:
        logger.warning("only integer weights can be extracted; 1/i (δ) connections are not supported")
        raise
    emit(print_term(term, shared=cfg.shared) + "\n", cfg.output)
    return 0


def cmd_verify(args, cfg: PipelineConfig) -> int:
    net, variables = load_network_document(args.network)
    if cfg.offsets is not None:
        variables = cfg.offsets.variables()
    text = read_text(args.reference)
    if is_table_text(text):
        table = parse_table(text)
        mismatch = network_table_mismatch(net, table)
        if mismatch:
            raise VerificationMismatch(mismatch)
        print(f"equal on all {table.k ** table.n} points of K^{table.n}")
        return 0
    term = parse_program(text)
    k = cfg.k or infer_k(net)
    report = verify_extraction(net, term, k, cfg.grid, variables)
    if not report.equal:
        raise VerificationMismatch(report.describe())
    print(report.describe())
    return 0


def roundtrip_one(table: TransitionTable, cfg: PipelineConfig) -> List[str]:
    """Failed stages of identify -> compile -> extract; empty when all pass."""
    nbhd = table_neighborhood(table, cfg)
    if nbhd.d != 1:
        raise PreconditionError("roundtrip supports 1D neighborhoods only")
    table = table.with_neighborhood(nbhd)
    failures = []

    flat = nbhd.flat
    seed = de_bruijn_config(table.k, max(flat) - min(flat) + 1)
    trace = evolve(table, nbhd, seed, 1)
    result = identify(trace)
    if result.table != table or not result.complete:
        failures.append(f"identify: coverage {result.coverage}, table differs")

    net = compile_for_path(table, cfg)
    mismatch = network_table_mismatch(net, table)
    if mismatch:
        failures.append(f"compile: {mismatch}")

    variables = table_variables(table)
    term = extract_network(net, table.k, variables)
    mismatch = term_table_mismatch(term, table, variables)
    if mismatch:
        failures.append(f"extract: {mismatch}")
    return failures


def cmd_roundtrip(args, cfg: PipelineConfig) -> int:
    if args.table:
        tables = [parse_table(read_text(args.table))]
    else:
        k = cfg.require_k()
        if cfg.seed is None:
            raise PreconditionError("roundtrip without a table file needs --seed")
        rng = random.Random(cfg.seed)
        nbhd = cfg.offsets if cfg.offsets is not None else contiguous_neighborhood(args.n or 2)
        tables = [random_table(k, nbhd.n, rng, nbhd) for _ in range(args.count)]

    failed = 0
    for i, table in enumerate(tqdm(tables, desc="roundtrip", leave=False)):
        failures = roundtrip_one(table, cfg)
        status = "PASS" if not failures else "FAIL"
        print(f"table {i}: {status}")
        for line in failures:
            print(f"  {line}")
        failed += bool(failures)
    if failed:
        raise VerificationMismatch(f"{failed} of {len(tables)} roundtrips failed")
    return 0


def cmd_rnn_evolve(args, cfg: PipelineConfig) -> int:
    table = parse_table(read_text(args.table))
    nbhd = table_neighborhood(table, cfg)
    if nbhd.d != 1:
        raise PreconditionError("rnn-evolve supports 1D neighborhoods only")
    norm = normalize_neighborhood(nbhd)
    if norm.neighborhood.n < 2:
        norm = NormalizedNeighborhood(contiguous_neighborhood(2), norm.shift, norm.positions)
    lifted = norm.lift(table).with_neighborhood(norm.neighborhood)
    logger.info(f"offsets {nbhd.format()} -> {norm.neighborhood.format()}, output shift {norm.shift}")
    rnn = build_rnn(lifted, lifted.n, lifted.k, cfg.cap)

    c0 = read_configuration(args.sequence, "zero")
    if c0.d != 1:
        raise PreconditionError("the input sequence must be a single line")
    configs = [c0]
    for _ in tqdm(range(args.steps), desc="rnn", leave=False):
        configs.append(Configuration(rnn_evolve_aligned(rnn, configs[-1].tolist(), norm.shift)))
    emit(format_trace(Trace(table.k, nbhd, configs, "zero")), cfg.output)
    return 0


COMMAND_REGISTRY = {
    "gen": cmd_gen,
    "evolve": cmd_evolve,
    "identify": cmd_identify,
    "compile": cmd_compile,
    "extract": cmd_extract,
    "verify": cmd_verify,
    "roundtrip": cmd_roundtrip,
    "rnn-evolve": cmd_rnn_evolve,
}


# === 3. Arguments ===
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Compile cellular automaton rules into ReLU networks and extract DMV formulas back.")
    parser.add_argument("--k", type=int, default=None, help="Number of states.")
    parser.add_argument("--offsets", type=str, default=None, help="Neighborhood offsets, e.g. '-1,0,1' or '(0,0),(0,1)'.")
    parser.add_argument("--boundary", type=str, default=None, help="Boundary policy: zero or periodic.")
    parser.add_argument("--grid", type=int, default=5, help="Grid points per axis for verification.")
    parser.add_argument("--cap", type=int, default=DEFAULT_CAP, help="Largest n for the interpolation path.")
    parser.add_argument("--seed", type=int, default=None, help="Seed for random tables.")
    parser.add_argument("--shared", action="store_true", help="Print extracted terms with let-bound shared subterms.")
    parser.add_argument("--path", type=str, default="auto", choices=PATHS, help="Table compilation path.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging.")
    parser.add_argument("-o", "--output", type=str, default=None, help="Output file (stdout if omitted).")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="Write a transition table.")
    p.add_argument("rule", nargs="?", default=None, help="Elementary index 0..255, 'life' or 'random'.")
    p.add_argument("--term", type=str, default=None, help="Term file defining the table on K^n.")
    p.add_argument("--n", type=int, default=None, help="Arity of a random table.")

    p = sub.add_parser("evolve", help="Evolve a configuration.")
    p.add_argument("table")
    p.add_argument("config")
    p.add_argument("--steps", type=int, default=1)

    p = sub.add_parser("identify", help="Recover the table from a trace.")
    p.add_argument("trace")

    p = sub.add_parser("compile", help="Compile a table or term file into a network.")
    p.add_argument("source")

    p = sub.add_parser("extract", help="Extract a DMV term from a network.")
    p.add_argument("network")

    p = sub.add_parser("verify", help="Compare a network with a term or table.")
    p.add_argument("network")
    p.add_argument("reference")

    p = sub.add_parser("roundtrip", help="identify -> compile -> extract on a table, or on random tables.")
    p.add_argument("table", nargs="?", default=None)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--n", type=int, default=None)

    p = sub.add_parser("rnn-evolve", help="Evolve a 1D configuration with the recurrent network.")
    p.add_argument("table")
    p.add_argument("sequence")
    p.add_argument("--steps", type=int, default=1)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="[%(levelname)s] %(message)s", force=True)
    try:
        cfg = PipelineConfig.from_args(args)
        return COMMAND_REGISTRY[args.command](args, cfg)
    except MvNetsError as e:
        logger.error(str(e))
        return e.exit_code
    except OSError as e:
        logger.error(f"cannot access {e.filename}: {e.strerror}")
        return PreconditionError.exit_code
    except Exception:
        logger.exception(f"{args.command} failed")
        return 1


if __name__ == "__main__":
    sys.exit(main())
