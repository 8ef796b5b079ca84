import random

import pytest

from conftest import F, RULE30_ENTRIES
from mvnets.cellular.dynamics import Configuration, apply_map
from mvnets.cellular.neighborhood import (
    Neighborhood, contiguous_neighborhood, elementary_neighborhood, normalize_neighborhood,
)
from mvnets.cellular.table import TransitionTable, random_table
from mvnets.errors import PreconditionError, ShapeError
from mvnets.extract.conversion import relu_to_sigma
from mvnets.netcore.network import eval_network
from mvnets.rnn.shift_rnn import (
    Rnn, build_rnn, build_shift_network, rnn_evolve, rnn_evolve_aligned, rnn_step,
)

AND_TABLE = TransitionTable(2, 2, [0, 0, 0, 1])


def zero_boundary_step(table, nbhd, seq):
    return apply_map(table, nbhd, Configuration(seq)).tolist()


class TestShiftNetwork:
    def test_drops_oldest_value(self):
        net = build_shift_network(3)
        assert eval_network(net, [F(1), F(1, 2), F(1, 3)]) == [F(1), F(1, 2)]

    def test_weights(self):
        net = build_shift_network(3)
        assert net.widths == [6, 2]
        assert [[int(w) for w in row] for row in net.layers[1].weights] == [
            [1, 0, 0, -1, 0, 0],
            [0, 1, 0, 0, -1, 0],
        ]
        assert net.layers[0].activation == "relu"

    def test_needs_two_inputs(self):
        with pytest.raises(PreconditionError):
            build_shift_network(1)


class TestRecurrence:
    def test_and_example(self):
        rnn = build_rnn(AND_TABLE, 2, 2)
        assert rnn.hidden_dim == 1
        assert rnn_evolve(rnn, [1, 1]) == [0, 1]
        assert rnn_evolve(rnn, [1, 1, 0, 1, 1, 1]) == [0, 1, 0, 0, 1, 1]

    def test_step_matches_parts(self, rng):
        rnn = build_rnn(TransitionTable(2, 3, RULE30_ENTRIES), 3, 2)
        for _ in range(10):
            x = F(rng.randrange(2))
            h = [F(rng.randrange(2)) for _ in range(2)]
            y, h_next = rnn_step(rnn, x, h)
            assert [y] == eval_network(rnn.phi_f, [x] + h)
            assert h_next == eval_network(rnn.phi_h, [x] + h)
            assert h_next == [x, h[0]]

    @pytest.mark.parametrize("seed", range(5))
    def test_rule30_matches_zero_boundary_step(self, rule30, seed):
        rng = random.Random(seed)
        norm = normalize_neighborhood(elementary_neighborhood())
        assert norm.shift == 1
        rnn = build_rnn(norm.lift(rule30), 3, 2)
        seq = [rng.randrange(2) for _ in range(64)]
        expected = zero_boundary_step(rule30, elementary_neighborhood(), seq)
        assert rnn_evolve_aligned(rnn, seq, norm.shift) == expected

    def test_three_states(self, rng):
        nbhd = contiguous_neighborhood(2)
        table = random_table(3, 2, rng, nbhd)
        rnn = build_rnn(table, 2, 3)
        for _ in range(3):
            seq = [rng.randrange(3) for _ in range(16)]
            assert rnn_evolve(rnn, seq) == zero_boundary_step(table, nbhd, seq)

    def test_non_contiguous_offsets(self, rng):
        nbhd = Neighborhood.line([1, 0, -2])
        table = random_table(2, 3, rng, nbhd)
        norm = normalize_neighborhood(nbhd)
        rnn = build_rnn(norm.lift(table), 4, 2)
        for _ in range(3):
            seq = [rng.randrange(2) for _ in range(20)]
            assert rnn_evolve_aligned(rnn, seq, norm.shift) == zero_boundary_step(table, nbhd, seq)

    def test_random_rules_on_long_sequences(self):
        rng = random.Random(64)
        cases = [(2, [1, 0, -1])] * 16 + [(3, [0, -1]), (3, [1, 0, -1]), (2, [1, 0, -2]), (2, [0, -1, -2, -3])]
        for k, offsets in cases:
            nbhd = Neighborhood.line(offsets)
            table = random_table(k, len(offsets), rng, nbhd)
            norm = normalize_neighborhood(nbhd)
            lifted = norm.lift(table)
            rnn = build_rnn(lifted, lifted.n, k)
            seq = [rng.randrange(k) for _ in range(64)]
            assert rnn_evolve_aligned(rnn, seq, norm.shift) == zero_boundary_step(table, nbhd, seq)

    def test_network_input(self, golden_f30):
        # golden_f30 computes rule 30 on its inputs in table order
        from_table = build_rnn(TransitionTable(2, 3, RULE30_ENTRIES), 3, 2)
        from_relu = build_rnn(golden_f30, 3, 2)
        from_sigma = build_rnn(relu_to_sigma(golden_f30), 3, 2)
        seq = [1, 0, 0, 1, 1, 1, 0, 1, 0, 0, 0, 1]
        expected = rnn_evolve(from_table, seq)
        assert rnn_evolve(from_relu, seq) == expected
        assert rnn_evolve(from_sigma, seq) == expected


class TestErrors:
    def test_non_contiguous_table_is_rejected(self, rule30):
        with pytest.raises(PreconditionError):
            build_rnn(rule30, 3, 2)

    def test_shape_checks(self, golden_f30):
        with pytest.raises(ShapeError):
            build_rnn(AND_TABLE, 2, 3)
        with pytest.raises(ShapeError):
            build_rnn(golden_f30, 2, 2)
        with pytest.raises(PreconditionError):
            build_rnn(AND_TABLE, 1, 2)
        with pytest.raises(ShapeError):
            Rnn(build_shift_network(3), build_shift_network(3), 2)

    def test_hidden_state_length(self):
        rnn = build_rnn(AND_TABLE, 2, 2)
        with pytest.raises(ShapeError):
            rnn_step(rnn, F(1), [F(0), F(0)])

    def test_negative_shift(self):
        with pytest.raises(PreconditionError):
            rnn_evolve_aligned(build_rnn(AND_TABLE, 2, 2), [1], -1)
