import itertools
import random

import pytest

from conftest import F, random_point
from mvnets.cellular.table import TransitionTable, elementary_table
from mvnets.errors import DomainError, PreconditionError, TermSyntaxError, UnboundVariableError
from mvnets.mvlogic.parser import parse_program, parse_term
from mvnets.mvlogic.printer import print_term
from mvnets.mvlogic.semantics import (
    as_valuations, eval_term, eval_term_batch, first_term_mismatch, lattice_points, op_delta, op_not, op_odot,
    op_oplus, terms_equal_on_grid, unit_grid,
)
from mvnets.mvlogic.tables import boolean_dnf, table_from_term
from mvnets.mvlogic.terms import (
    ONE, ZERO, Delta, Not, Odot, Oplus, Var, Wedge, expand_sugar, odot_chain, oplus_chain, substitute, term_size,
    term_variables,
)

X, Y, Z = Var(0), Var(1), Var(2)


def random_term(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.15:
        return rng.choice([ZERO, Var(rng.randint(-3, 3))])
    kind = rng.choice(["not", "delta", "oplus", "odot", "wedge"])
    if kind == "not":
        return Not(random_term(rng, depth - 1))
    if kind == "delta":
        return Delta(rng.randint(1, 9), random_term(rng, depth - 1))
    node = {"oplus": Oplus, "odot": Odot, "wedge": Wedge}[kind]
    return node(random_term(rng, depth - 1), random_term(rng, depth - 1))


class TestSemantics:
    def test_basic_operations(self):
        val = {0: F(1, 2), 1: F(3, 4)}
        assert eval_term(Oplus(X, Y), val) == 1
        assert eval_term(Odot(X, Y), val) == F(1, 4)
        assert eval_term(Not(X), val) == F(1, 2)
        assert eval_term(Delta(3, ONE), val) == F(1, 3)
        assert eval_term(Wedge(X, Y), val) == F(1, 2)
        assert eval_term(ZERO, val) == 0

    def test_wedge_is_min_and_expands(self):
        grid = as_valuations(unit_grid(2, 7), [0, 1])
        for val in grid:
            assert eval_term(Wedge(X, Y), val) == min(val[0], val[1])
        assert terms_equal_on_grid(Wedge(X, Y), expand_sugar(Wedge(X, Y)), grid)

    def test_unbound_variable(self):
        with pytest.raises(UnboundVariableError):
            eval_term(Oplus(X, Y), {0: F(0)})

    def test_value_outside_unit_interval(self):
        with pytest.raises(DomainError):
            eval_term(X, {0: F(3, 2)})

    def test_totalistic_sum_over_three_states(self):
        term = parse_term("x[-1] + x[0] + x[1]")
        points = lattice_points(3, 3)
        values = eval_term_batch(term, as_valuations(points, [-1, 0, 1]))
        assert len(values) == 27
        for p, v in zip(points, values):
            assert v == min(F(1), sum(p))

    def test_first_mismatch_reports_point(self):
        grid = as_valuations(unit_grid(2, 3), [0, 1])
        point, a, b = first_term_mismatch(Oplus(X, Y), Odot(X, Y), grid)
        assert point == {0: F(0), 1: F(1, 2)}
        assert (a, b) == (F(1, 2), F(0))
        assert first_term_mismatch(Oplus(X, Y), Oplus(Y, X), grid) is None

    def test_grid_density_must_be_at_least_two(self):
        with pytest.raises(DomainError):
            unit_grid(2, 1)

    def test_deep_term_evaluates_without_recursion(self):
        term = X
        for _ in range(5000):
            term = Not(term)
        assert eval_term(term, {0: F(1, 3)}) == F(1, 3)
        assert term_size(term) == 5001


class TestTerms:
    def test_chains(self):
        assert oplus_chain([]) is ZERO
        assert odot_chain([]) == ONE
        assert oplus_chain([X, Y, Z]) == Oplus(Oplus(X, Y), Z)

    def test_variables_and_size_count_shared_nodes_once(self):
        a = Odot(X, Var(-1))
        term = Oplus(a, a)
        assert term_variables(term) == [-1, 0]
        assert term_size(term) == 4

    def test_substitute(self):
        term = substitute(Oplus(X, Y), {1: Not(X)})
        assert term == Oplus(X, Not(X))

    def test_delta_index_positive(self):
        with pytest.raises(PreconditionError):
            Delta(0, X)


class TestParser:
    def test_precedence(self):
        assert parse_term("x + y * z") == Oplus(X, Odot(Y, Z))
        assert parse_term("x * y & z") == Wedge(Odot(X, Y), Z)
        assert parse_term("~~x") == Not(Not(X))
        assert parse_term("d2(1)") == Delta(2, ONE)

    def test_indexed_variables(self):
        assert parse_term("x[-1] + x[0] + x[1]") == Oplus(Oplus(Var(-1), Var(0)), Var(1))

    @pytest.mark.parametrize("text, expected", [
        ("x [0]", Var(0)),
        ("x[ -1 ]", Var(-1)),
        ("x [+2]", Var(2)),
        ("d 2(1)", Delta(2, ONE)),
        ("d3 (x[0])", Delta(3, X)),
    ])
    def test_whitespace_inside_atoms(self, text, expected):
        assert parse_term(text) == expected

    def test_names_follow_first_appearance(self):
        assert parse_term("y + x") == Oplus(Var(0), Var(1))
        assert parse_term("y + x", names={"x": 0, "y": 1}) == Oplus(Y, X)

    @pytest.mark.parametrize("text, position", [
        ("x +", 3),
        ("x )", 2),
        ("x $ y", 2),
        ("(x + y", 6),
    ])
    def test_errors_carry_position(self, text, position):
        with pytest.raises(TermSyntaxError) as excinfo:
            parse_term(text)
        assert excinfo.value.position == position

    def test_program_with_bindings(self):
        term = parse_program("let t0 = (x[0] * x[1])\n# comment\n\n(t0 + ~t0)\n")
        a = Odot(X, Y)
        assert term == Oplus(a, Not(a))

    @pytest.mark.parametrize("text", [
        "let t = x\nlet t = y\nt",
        "x\ny",
        "let t = x",
    ])
    def test_program_errors(self, text):
        with pytest.raises(TermSyntaxError):
            parse_program(text)


class TestPrinter:
    def test_fully_parenthesized(self):
        term = parse_term("x[-1] + x[0] * ~x[1]")
        assert print_term(term) == "(x[-1] + (x[0] * ~x[1]))"
        assert print_term(Delta(3, Not(ZERO))) == "d3(~0)"
        assert parse_term(print_term(term)) == term

    def test_shared_output_binds_reused_nodes(self):
        a = Odot(X, Y)
        text = print_term(Oplus(a, a), shared=True)
        assert text == "let t0 = (x[0] * x[1])\n(t0 + t0)"
        assert parse_program(text) == Oplus(a, a)

    def test_unshared_term_has_no_bindings(self):
        assert print_term(Oplus(X, Y), shared=True) == "(x[0] + x[1])"


class TestTables:
    def test_rule30_dnf_matches_table(self, rule30):
        term = boolean_dnf(rule30)
        assert term_variables(term) == [-1, 0, 1]
        assert table_from_term(term, 2, [-1, 0, 1]) == rule30

    def test_dnf_of_all_false_table_is_zero(self):
        assert boolean_dnf(TransitionTable(2, 2, [0, 0, 0, 0])) is ZERO

    def test_dnf_needs_two_states(self):
        with pytest.raises(PreconditionError):
            boolean_dnf(TransitionTable(3, 1, [0, 1, 2]))

    def test_totalistic_table(self):
        table = table_from_term(parse_term("x[-1] + x[0] + x[1]"), 3)
        for xs, out in table.items():
            assert out == min(2, sum(xs))

    def test_table_from_term_needs_values_in_k(self):
        with pytest.raises(DomainError):
            table_from_term(Delta(3, X), 3, [0])

    def test_equivalent_terms_on_three_states(self):
        tau1 = parse_term("(x[-1] + x[-1]) & (~x[-1] + ~x[-1]) & (x[0] + x[0]) & (~x[0] + ~x[0])")
        tau2 = parse_term("(x[-1] + x[-1]) & (~x[-1] + ~x[-1]) & (x[0] + x[0] + x[0]) & (~x[0] + ~x[0] + ~x[0])")
        expected = TransitionTable(3, 2, [2 if xs == (1, 1) else 0 for xs in itertools.product(range(3), repeat=2)])
        assert table_from_term(tau1, 3, [-1, 0]) == expected
        assert table_from_term(tau2, 3, [-1, 0]) == expected

    def test_rule30_reduced_dnf_is_equivalent(self):
        reduced = parse_term("(x[-1] * ~x[0] * ~x[1]) + (~x[-1] * x[1]) + (~x[-1] * x[0])")
        assert table_from_term(reduced, 2, [-1, 0, 1]) == elementary_table(30)


class TestAlgebra:
    @pytest.fixture
    def triples(self, rng):
        return [random_point(rng, 3, denom=24) for _ in range(200)]

    def test_mv_axioms(self, triples):
        for x, y, z in triples:
            assert op_oplus(x, op_oplus(y, z)) == op_oplus(op_oplus(x, y), z)
            assert op_oplus(x, y) == op_oplus(y, x)
            assert op_oplus(x, 0) == x
            assert op_not(op_not(x)) == x
            assert op_oplus(x, op_not(0)) == 1
            assert op_oplus(op_not(op_oplus(op_not(x), y)), y) == op_oplus(op_not(op_oplus(op_not(y), x)), x)

    def test_odot_is_dual_of_oplus(self, triples):
        for x, y, _ in triples:
            assert op_odot(x, y) == op_not(op_oplus(op_not(x), op_not(y)))
            val = {0: x, 1: y}
            assert eval_term(Odot(X, Y), val) == eval_term(Not(Oplus(Not(X), Not(Y))), val)

    @pytest.mark.parametrize("i", [1, 2, 3, 7])
    def test_delta_axioms(self, i, triples):
        d = Delta(i, X)
        for x, _, _ in triples:
            val = {0: x}
            assert eval_term(oplus_chain([d] * i), val) == x
            rest = oplus_chain([Not(X)] + [d] * (i - 1))
            assert eval_term(Odot(d, rest), val) == 0
            assert op_delta(i, x) * i == x


class TestRoundtrips:
    def test_print_then_parse_random_terms(self):
        rng = random.Random(7)
        for _ in range(300):
            term = random_term(rng, rng.randint(0, 12))
            assert parse_term(print_term(term)) == term
            assert parse_program(print_term(term, shared=True)) == term

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_boolean_dnf_of_random_tables(self, n):
        rng = random.Random(n)
        variables = list(range(n))
        for _ in range(25):
            table = TransitionTable(2, n, [rng.randrange(2) for _ in range(2 ** n)])
            assert table_from_term(boolean_dnf(table), 2, variables) == table
