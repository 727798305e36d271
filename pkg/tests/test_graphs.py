import math

import numpy as np
import pytest
from scipy import stats

from erconsensus.graphs import (
    DirectedGraph,
    GraphSeed,
    ModelParams,
    decode_adjacency_masks,
    enumerate_graphs,
    graph_from_mask,
    sample_graph,
)


class TestModelParams:
    def test_valid(self):
        params = ModelParams(3, 0.5)
        assert params.q == 0.5

    @pytest.mark.parametrize("p", [0.0, -0.1, 1.5])
    def test_bad_p_rejected(self, p):
        with pytest.raises(ValueError):
            ModelParams(3, p)

    def test_p_one_allowed(self):
        assert ModelParams(2, 1.0).q == 0.0

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            ModelParams(1, 0.5)

    def test_non_integer_n_rejected(self):
        with pytest.raises(TypeError):
            ModelParams(3.0, 0.5)


class TestGraphSeed:
    def test_same_seed_same_sequence(self):
        params = ModelParams(6, 0.4)
        a = [sample_graph(params, GraphSeed(11, 2).generator()) for _ in range(1)]
        first = GraphSeed(11, 2).generator()
        second = GraphSeed(11, 2).generator()
        for _ in range(5):
            ga = sample_graph(params, first)
            gb = sample_graph(params, second)
            assert np.array_equal(ga.adjacency, gb.adjacency)
        del a

    def test_distinct_streams_differ(self):
        params = ModelParams(6, 0.4)
        ga = sample_graph(params, GraphSeed(11, 0).generator())
        gb = sample_graph(params, GraphSeed(11, 1).generator())
        assert not np.array_equal(ga.adjacency, gb.adjacency)

    def test_replication_matches_nested_spawn_key(self):
        a = GraphSeed(3, 4).replication(9).random(8)
        b = np.random.default_rng(
            np.random.SeedSequence(entropy=3, spawn_key=(4, 9))
        ).random(8)
        assert np.array_equal(a, b)


class TestSampleGraph:
    @pytest.mark.parametrize("n", [3, 5])
    def test_p_one_gives_complete_digraph(self, n):
        g = sample_graph(ModelParams(n, 1.0), GraphSeed(0).generator())
        assert np.all(g.out_degrees == n - 1)
        assert not g.adjacency.diagonal().any()

    def test_out_degrees_consistent(self):
        g = sample_graph(ModelParams(8, 0.3), GraphSeed(5).generator())
        assert np.array_equal(g.out_degrees, g.adjacency.sum(axis=1))

    def test_edge_frequency_binomial_ci(self):
        # 5e4 graphs on 2 nodes = 1e5 Bernoulli slots; 3-sigma band.
        draws = 50_000
        rng = GraphSeed(123).generator()
        params = ModelParams(2, 0.5)
        edges = sum(int(sample_graph(params, rng).out_degrees.sum()) for _ in range(draws))
        freq = edges / (2 * draws)
        assert abs(freq - 0.5) <= 3.0 * math.sqrt(0.25 / (2 * draws))

    def test_out_degree_chi_square_gof(self):
        # Rows are independent, so pooling them gives >= 1e5 degree samples.
        n, p, graphs = 6, 0.35, 17_000
        rng = GraphSeed(2024).generator()
        params = ModelParams(n, p)
        degrees = np.concatenate(
            [sample_graph(params, rng).out_degrees for _ in range(graphs)]
        )
        observed = np.bincount(degrees, minlength=n)
        expected = stats.binom.pmf(np.arange(n), n - 1, p) * degrees.size
        assert expected.min() > 5.0  # no tail merging needed at this (n, p)
        result = stats.chisquare(observed, expected)
        assert result.pvalue > 0.001


class TestDirectedGraph:
    def test_rejects_self_loops(self):
        with pytest.raises(ValueError):
            DirectedGraph.from_adjacency(np.eye(3, dtype=bool))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            DirectedGraph.from_adjacency(np.zeros((2, 3), dtype=bool))


class TestEnumeration:
    def test_counts_all_realizations(self):
        graphs = list(enumerate_graphs(ModelParams(3, 0.3)))
        assert len(graphs) == 64

    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    def test_probabilities_sum_to_one(self, n, p):
        total = sum(prob for _, prob in enumerate_graphs(ModelParams(n, p)))
        assert abs(total - 1.0) < 1e-12

    def test_n2_half_is_uniform(self):
        probs = [prob for _, prob in enumerate_graphs(ModelParams(2, 0.5))]
        assert probs == [0.25, 0.25, 0.25, 0.25]

    def test_n2_p_one_concentrates_on_complete(self):
        items = list(enumerate_graphs(ModelParams(2, 1.0)))
        complete = [prob for g, prob in items if g.out_degrees.sum() == 2]
        assert complete == [1.0]
        assert sum(prob for _, prob in items) == 1.0

    def test_rejects_large_n(self):
        with pytest.raises(ValueError):
            next(enumerate_graphs(ModelParams(6, 0.5)))

    def test_mask_decoding_paths_agree(self):
        n = 3
        masks = np.arange(2 ** (n * (n - 1)))
        tensor = decode_adjacency_masks(n, masks)
        for mask in masks:
            assert np.array_equal(tensor[mask], graph_from_mask(n, int(mask)).adjacency)
