import random

import pytest

from conftest import F, binary_inputs, clamp, random_network, random_point
from mvnets.cellular.dynamics import de_bruijn_config, evolve
from mvnets.cellular.identify import identify
from mvnets.cellular.neighborhood import contiguous_neighborhood
from mvnets.cellular.table import TransitionTable, random_table
from mvnets.compiler.table_compiler import compile_boolean, compile_table
from mvnets.errors import ActivationKindError, RangeError, ShapeError, WeightDisciplineError
from mvnets.extract.conversion import relu_to_sigma, sigma_copies, sigma_to_relu
from mvnets.extract.network_extractor import (
    extract_network, to_sigma_network, verification_points, verify_extraction,
)
from mvnets.extract.neuron import NeuronForm, constant_term, extract_neuron
from mvnets.mvlogic.parser import parse_term
from mvnets.mvlogic.semantics import (
    as_valuations, eval_term, eval_term_batch, lattice_points, op_odot, op_oplus, terms_equal_on_grid, unit_grid,
)
from mvnets.mvlogic.tables import table_from_term
from mvnets.mvlogic.terms import ONE, ZERO, Var
from mvnets.netcore.constructions import augment, compose
from mvnets.netcore.network import AffineLayer, Network, audit_weights, eval_network, eval_network_batch, network_kind

GRID_1D = as_valuations(unit_grid(1, 13), [0])
GRID_2D = as_valuations(unit_grid(2, 9), [0, 1])


def neuron_values_match(form: NeuronForm, term, valuations) -> bool:
    n = len(form.weights)
    return all(eval_term(term, val) == form.value([val[j] for j in range(n)]) for val in valuations)


def hat(x: F) -> F:
    return 2 * x if x <= F(1, 2) else 2 - 2 * x


def hat_sigma() -> Network:
    """σ(σ(2x) - σ(2x - 1)): rises to 1 at x = 1/2 and falls back to 0."""
    return Network(1, [
        AffineLayer([[2], [2]], [0, -1], "sigma"),
        AffineLayer([[1, -1]], [0], "sigma"),
    ])


def hat_readout() -> Network:
    """σ(2x) - σ(2x - 1), the same hat with an untagged output."""
    return Network(1, [
        AffineLayer([[2], [2]], [0, -1], "sigma"),
        AffineLayer([[1, -1]], [0]),
    ])


def hat_relu() -> Network:
    """ρ(1 - ρ(1 - 2x) - ρ(2x - 1))."""
    return Network(1, [
        AffineLayer([[-2], [2]], [1, -1], "relu"),
        AffineLayer([[-1, -1]], [1], "relu"),
    ])


class TestNeuron:
    @pytest.mark.parametrize("bias, expected", [
        (F(2), ONE),
        (F(-3), ZERO),
    ])
    def test_saturated_neurons(self, bias, expected):
        assert extract_neuron(NeuronForm((1,), bias), k=3) == expected

    @pytest.mark.parametrize("bias", [F(-1, 2), F(1, 2)])
    def test_shifted_identity(self, bias):
        form = NeuronForm((1,), bias)
        assert neuron_values_match(form, extract_neuron(form, k=3), GRID_1D)

    def test_plain_input(self):
        assert extract_neuron(NeuronForm((0, 1), F(0))) == Var(1)

    def test_constants(self):
        assert eval_term(constant_term(F(2, 3)), {}) == F(2, 3)
        assert extract_neuron(NeuronForm((0,), F(1, 4)), k=5) == constant_term(F(1, 4))

    def test_two_variable_example(self):
        form = NeuronForm((1, -2), F(1, 2))
        term = extract_neuron(form, k=3)
        assert neuron_values_match(form, term, GRID_2D)
        written = parse_term("~((((~(d2(1) + x) + y) * ~(x * d2(1))) + y) * (~(x * d2(1)) + y))")
        assert terms_equal_on_grid(term, written, GRID_2D)
        for val in GRID_2D:
            assert eval_term(written, val) == clamp(val[0] - 2 * val[1] + F(1, 2))

    def test_random_neurons(self):
        rng = random.Random(11)
        for _ in range(100):
            n = rng.randint(1, 3)
            form = NeuronForm(tuple(rng.randint(-3, 3) for _ in range(n)), F(rng.randint(-6, 6), 3))
            term = extract_neuron(form, k=4)
            points = [random_point(rng, n) for _ in range(5)]
            assert neuron_values_match(form, term, as_valuations(points, list(range(n))))

    def test_peeling_identity_on_grid(self):
        rng = random.Random(12)
        checked = 0
        while checked < 500:
            n = rng.randint(1, 3)
            weights = tuple(rng.randint(-3, 3) for _ in range(n))
            if not any(m > 0 for m in weights):
                continue
            form = NeuronForm(weights, F(rng.randint(-8, 8), 4))
            j = weights.index(max(weights))
            rest = NeuronForm(tuple(m - (i == j) for i, m in enumerate(weights)), form.bias)
            shifted = NeuronForm(rest.weights, rest.bias + 1)
            term = extract_neuron(form, k=5)
            grid = unit_grid(n, 5)
            values = eval_term_batch(term, as_valuations(grid, list(range(n))))
            for x, v in zip(grid, values):
                assert form.value(x) == op_odot(op_oplus(rest.value(x), x[j]), shifted.value(x))
                assert v == form.value(x)
            checked += 1

    @pytest.mark.parametrize("weights, bias", [
        ((2, 1, 1), F(-1)),
        ((1, -2, 3), F(1, 2)),
        ((2, -1), F(0)),
        ((3, 1), F(-5)),
        ((1, 1), F(3)),
    ], ids=["all-positive", "mixed-sign", "zero-bias", "saturated-low", "saturated-high"])
    def test_neuron_cases(self, weights, bias):
        form = NeuronForm(weights, bias)
        n = len(weights)
        term = extract_neuron(form, k=3)
        assert neuron_values_match(form, term, as_valuations(unit_grid(n, 5), list(range(n))))

    def test_shared_states(self):
        # the two branches of one step reach the same (m, b) state again
        term = extract_neuron(NeuronForm((2, 2), F(-1)), k=2)
        assert neuron_values_match(NeuronForm((2, 2), F(-1)), term, GRID_2D)

    def test_discipline(self):
        with pytest.raises(WeightDisciplineError):
            NeuronForm((F(1, 2),), F(0))
        with pytest.raises(WeightDisciplineError):
            extract_neuron(NeuronForm((1,), F(1, 3)), k=3)
        with pytest.raises(ShapeError):
            extract_neuron(NeuronForm((1, 1), F(0)), inputs=[Var(0)])


class TestConversion:
    def test_sigma_copies(self):
        assert [sigma_copies(F(v)) for v in (0, 1, F(3, 2), 2, 3)] == [0, 0, 1, 1, 2]

    def test_relu_to_sigma_random(self):
        rng = random.Random(8)
        for _ in range(50):
            net = random_network(rng, [2, 3, 3, 1], bias_denom=2)
            converted = relu_to_sigma(net, k=3)
            assert network_kind(converted) in ("sigma", "affine")
            assert converted.depth == net.depth
            audit_weights(converted, k=3)
            for _ in range(200):
                x = random_point(rng, 2, denom=30)
                assert eval_network(converted, x) == eval_network(net, x)

    def test_relu_output_layer_is_retagged(self):
        net = Network(1, [AffineLayer([[1]], [0], "relu"), AffineLayer([[2]], [-1], "relu")])
        converted = relu_to_sigma(net)
        assert converted.depth == 2
        assert converted.layers[-1].activation == "sigma"
        for x in [[F(i, 6)] for i in range(7)]:
            assert eval_network(converted, x) == eval_network(net, x)

    def test_relu_output_above_one_is_refused(self):
        with pytest.raises(RangeError):
            relu_to_sigma(Network(1, [AffineLayer([[3]], [0], "relu")]))

    def test_sigma_to_relu_random(self):
        rng = random.Random(9)
        for _ in range(50):
            net = random_network(rng, [2, 3, 3, 1], activation="sigma", bias_denom=2)
            converted = sigma_to_relu(net)
            assert network_kind(converted) in ("relu", "affine")
            assert converted.depth == net.depth
            audit_weights(converted, k=3)
            for _ in range(200):
                x = random_point(rng, 2, denom=30)
                assert eval_network(converted, x) == eval_network(net, x)

    def test_kind_checks(self, golden_f30):
        with pytest.raises(ActivationKindError):
            relu_to_sigma(hat_sigma())
        with pytest.raises(ActivationKindError):
            sigma_to_relu(golden_f30)
        with pytest.raises(ActivationKindError):
            sigma_to_relu(hat_sigma())


class TestExtractNetwork:
    def test_golden_rule30(self, golden_f30, rule30):
        term = extract_network(golden_f30)
        assert table_from_term(term, 2, [0, 1, 2]) == rule30

    def test_boolean_path_roundtrip(self, rule30):
        term = extract_network(compile_boolean(rule30), k=2, variables=[-1, 0, 1])
        for xs in binary_inputs(3):
            assert eval_term(term, dict(zip([-1, 0, 1], map(F, xs)))) == rule30.lookup(xs)

    def test_totalistic(self, totalistic_net):
        term = extract_network(totalistic_net, k=3, variables=[-1, 0, 1])
        report = verify_extraction(totalistic_net, term, 3, variables=[-1, 0, 1])
        assert report.equal, report.describe()
        reference = parse_term("x[-1] + x[0] + x[1]")
        valuations = as_valuations(unit_grid(3, 5), [-1, 0, 1])
        assert terms_equal_on_grid(term, reference, valuations)

    def test_interpolated_table(self):
        table = TransitionTable(4, 1, [0, 3, 3, 0])
        term = extract_network(compile_table(table), k=4)
        fine = as_valuations(unit_grid(1, 101), [0])
        corrected = parse_term("(x + x + x) & ~0 & ~(x * x * x)")
        assert terms_equal_on_grid(term, corrected, fine)
        literal = parse_term("(x + x + x) & ~0 & (x * x * x)")
        assert eval_term(literal, {0: F(1)}) != eval_term(term, {0: F(1)})

    def test_hat_from_both_kinds(self):
        a = extract_network(hat_sigma(), k=2)
        b = extract_network(hat_relu(), k=2)
        relu_readout = sigma_to_relu(hat_readout())
        for val in GRID_1D:
            x = val[0]
            assert eval_term(a, val) == hat(x)
            assert eval_term(b, val) == hat(x)
            assert eval_network(relu_readout, [x]) == [hat(x)]

    def test_hat_composed_with_itself(self):
        twice = compose(hat_readout(), hat_sigma())
        assert network_kind(twice) == "sigma" and twice.depth == 4
        term = extract_network(twice, k=2)
        grid = as_valuations(unit_grid(1, 17), [0])
        for val in grid:
            x = val[0]
            assert eval_network(twice, [x]) == [hat(hat(x))]
            assert eval_term(term, val) == hat(hat(x))
        # σ(4x) - σ(4x - 1) + σ(4x - 2) - σ(4x - 3) in two layers
        direct = Network(1, [
            AffineLayer([[4], [4], [4], [4]], [0, -1, -2, -3], "sigma"),
            AffineLayer([[1, -1, 1, -1]], [0], "sigma"),
        ])
        assert terms_equal_on_grid(extract_network(direct, k=2), term, grid)

    def test_untagged_hidden_layer_is_folded(self):
        # ρ(-(2x - 1)): the untagged first layer ranges over [-1, 1]
        net = Network(1, [
            AffineLayer([[2]], [-1]),
            AffineLayer([[-1]], [0], "relu"),
            AffineLayer([[1]], [0]),
        ])
        term = extract_network(net, k=2)
        for val in GRID_1D:
            assert eval_term(term, val) == max(F(0), 1 - 2 * val[0])
        assert verify_extraction(net, term, 2).equal

    def test_identity_augmented_rule30(self, golden_f30, rule30):
        sigma_f30 = to_sigma_network(golden_f30, 2)
        deeper = augment(sigma_f30, sigma_f30.depth + 2)
        assert deeper != sigma_f30 and network_kind(deeper) == "sigma"
        term = extract_network(deeper, k=2)
        assert table_from_term(term, 2, [0, 1, 2]) == rule30
        grid = unit_grid(3, 5)
        assert terms_equal_on_grid(term, extract_network(golden_f30), as_valuations(grid, [0, 1, 2]))
        relu_deeper = augment(golden_f30, 5)
        assert eval_network_batch(relu_deeper, grid) == eval_network_batch(golden_f30, grid)

    def test_infers_k(self, golden_f30, caplog):
        with caplog.at_level("INFO"):
            extract_network(golden_f30)
        assert "inferred k=2" in caplog.text

    def test_errors(self, golden_f30):
        mixed = Network(1, [AffineLayer([[1]], [0], "relu"), AffineLayer([[1]], [0], "sigma")])
        with pytest.raises(ActivationKindError):
            extract_network(mixed, k=2)
        with pytest.raises(ShapeError):
            extract_network(Network(1, [AffineLayer([[1], [1]], [0, 0])]), k=2)
        with pytest.raises(ShapeError):
            extract_network(golden_f30, k=2, variables=[0, 1])
        delta_net = Network(1, [AffineLayer([[F(1, 2)]], [0], "relu"), AffineLayer([[1]], [0])])
        with pytest.raises(WeightDisciplineError):
            extract_network(delta_net, k=2)

    def test_unprovable_range(self):
        net = Network(1, [AffineLayer([[1]], [0], "relu"), AffineLayer([[2]], [0])])
        with pytest.raises(RangeError):
            extract_network(net, k=2)


class TestVerify:
    def test_points_cover_grid_and_lattice(self):
        points = verification_points(1, 4, 3)
        assert points == [(F(0),), (F(1, 2),), (F(1),), (F(1, 3),), (F(2, 3),)]

    def test_mismatch_is_reported(self, golden_f30):
        report = verify_extraction(golden_f30, ZERO, 2)
        assert not report.equal
        point, net_value, term_value = report.first_mismatch
        assert point == (F(0), F(0), F(1, 4))
        assert (net_value, term_value) == (F(1, 4), F(0))
        assert report.describe().startswith("first mismatch at (")


class TestEndToEnd:
    def test_random_tables_through_identify_compile_extract(self):
        rng = random.Random(2024)
        for _ in range(50):
            k, n = rng.choice([2, 3, 4]), rng.choice([1, 2, 3])
            nbhd = contiguous_neighborhood(n)
            table = random_table(k, n, rng, nbhd)
            result = identify(evolve(table, nbhd, de_bruijn_config(k, n), 1))
            assert result.coverage == 1 and result.table == table
            net = compile_table(result.table)
            term = extract_network(net, k=k)
            points = lattice_points(n, k)
            expected = [F(out, k - 1) for _, out in table.items()]
            assert [row[0] for row in eval_network_batch(net, points)] == expected
            assert eval_term_batch(term, as_valuations(points, list(range(n)))) == expected
