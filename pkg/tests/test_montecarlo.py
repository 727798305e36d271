import math

import numpy as np
import pytest

from erconsensus.dynamics import NonConvergenceError
from erconsensus.graphs import GraphSeed, ModelParams
from erconsensus.montecarlo import (
    EnsembleStats,
    ExperimentConfig,
    factor_sweep,
    jackknife_variance_stderr,
    resolve_x0,
    run_ensemble,
    sweep_fixed_degree,
)
from erconsensus.moments import consensus_variance, variance_factor


class TestResolveX0:
    def test_ramp(self):
        assert np.array_equal(resolve_x0("ramp", 2), [0.5, 1.0])
        assert np.array_equal(resolve_x0("ramp", 4), [0.25, 0.5, 0.75, 1.0])

    def test_const(self):
        assert np.array_equal(resolve_x0("const:2.5", 3), [2.5, 2.5, 2.5])

    def test_explicit_vector_passthrough(self):
        assert np.array_equal(resolve_x0([1.0, 2.0, 3.0], 3), [1.0, 2.0, 3.0])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            resolve_x0([1.0, 2.0], 3)

    def test_unknown_rule(self):
        with pytest.raises(ValueError):
            resolve_x0("linspace", 3)


class TestJackknife:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(5)
        x = rng.normal(2.0, 1.5, size=400)
        loo = np.array([np.var(np.delete(x, i), ddof=1) for i in range(x.size)])
        brute = math.sqrt((x.size - 1) / x.size * np.sum((loo - loo.mean()) ** 2))
        assert jackknife_variance_stderr(x) == pytest.approx(brute, rel=1e-10)

    def test_zero_for_constant_data(self):
        assert jackknife_variance_stderr(np.full(50, 1.23)) == 0.0

    def test_zero_for_tiny_samples(self):
        assert jackknife_variance_stderr([1.0, 2.0]) == 0.0

    def test_shrinks_with_sample_size(self):
        rng = np.random.default_rng(11)
        small = jackknife_variance_stderr(rng.normal(size=200))
        large = jackknife_variance_stderr(rng.normal(size=20_000))
        assert large < small


def _config(n=8, p=0.5, reps=64, seed=13, **kwargs):
    return ExperimentConfig(
        params=ModelParams(n, p),
        x0_spec="ramp",
        reps=reps,
        seed=GraphSeed(seed),
        **kwargs,
    )


class TestRunEnsemble:
    def test_deterministic_across_thread_counts(self):
        cfg = _config()
        reference = run_ensemble(cfg, threads=1)
        assert run_ensemble(cfg, threads=4) == reference
        assert run_ensemble(cfg, threads=16) == reference
        assert run_ensemble(cfg, threads=0) == reference

    def test_complete_graph_degenerates(self):
        cfg = _config(n=5, p=1.0, reps=10)
        stats = run_ensemble(cfg)
        assert stats.variance == 0.0
        assert stats.stderr_variance == 0.0
        assert stats.nonconverged == 0
        assert stats.reps_used == 10
        assert abs(stats.mean - np.mean(resolve_x0("ramp", 5))) < 1e-12

    def test_constant_x0_zero_variance(self):
        cfg = ExperimentConfig(
            params=ModelParams(4, 0.4),
            x0_spec="const:1.7",
            reps=20,
            seed=GraphSeed(3),
        )
        stats = run_ensemble(cfg)
        assert stats.variance == 0.0
        assert stats.mean == 1.7

    def test_reps_validation(self):
        with pytest.raises(ValueError):
            _config(reps=0)

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            run_ensemble(_config(), nonconvergence="ignore")

    def test_fatal_nonconvergence_lists_indices(self):
        cfg = ExperimentConfig(
            params=ModelParams(2, 0.9),
            x0_spec=[0.0, 1.0],
            reps=50,
            seed=GraphSeed(1),
            max_steps=2,
        )
        with pytest.raises(NonConvergenceError) as info:
            run_ensemble(cfg)
        message = str(info.value)
        assert "did not converge" in message
        assert "indices" in message

    def test_drop_policy_counts_failures(self):
        cfg = ExperimentConfig(
            params=ModelParams(2, 0.9),
            x0_spec=[0.0, 1.0],
            reps=50,
            seed=GraphSeed(1),
            max_steps=2,
        )
        stats = run_ensemble(cfg, nonconvergence="drop")
        assert stats.nonconverged > 0
        assert stats.reps_used == 50 - stats.nonconverged
        assert 0.0 <= stats.mean <= 1.0

    def test_drop_with_all_failures_still_raises(self):
        # At n = 20, p = 0.2 a single step cannot reach exact consensus
        # (that would need the complete graph), so every replication fails.
        cfg = ExperimentConfig(
            params=ModelParams(20, 0.2),
            x0_spec="ramp",
            reps=5,
            seed=GraphSeed(0),
            tol=1e-300,
            max_steps=1,
        )
        with pytest.raises(NonConvergenceError):
            run_ensemble(cfg, nonconvergence="drop")

    def test_two_node_half_matches_closed_form(self):
        # Closed form gives exactly 0.05 for x0 = (0, 1).
        cfg = ExperimentConfig(
            params=ModelParams(2, 0.5),
            x0_spec=[0.0, 1.0],
            reps=100_000,
            seed=GraphSeed(99),
        )
        stats = run_ensemble(cfg)
        assert abs(stats.variance - 0.05) <= 4.0 * stats.stderr_variance
        se_mean = math.sqrt(stats.variance / stats.reps_used)
        assert abs(stats.mean - 0.5) <= 4.0 * se_mean

    def test_medium_grid_point_within_four_sigma(self):
        params = ModelParams(20, 0.25)
        cfg = ExperimentConfig(
            params=params, x0_spec="ramp", reps=2000, seed=GraphSeed(1)
        )
        stats = run_ensemble(cfg)
        analytic = consensus_variance(params, resolve_x0("ramp", 20)).variance
        assert abs(stats.variance - analytic) <= 4.0 * stats.stderr_variance


class TestSweepFixedDegree:
    def test_smoke_rows(self):
        rows = sweep_fixed_degree(5.0, range(5, 8), reps=300, seed=7)
        assert [row.n for row in rows] == [5, 6, 7]
        endpoint = rows[0]
        assert endpoint.p == 1.0
        assert endpoint.analytic_variance == 0.0
        assert endpoint.empirical_variance == 0.0
        assert endpoint.stderr == 0.0
        for row in rows:
            params = ModelParams(row.n, row.p)
            x0 = resolve_x0("ramp", row.n)
            assert row.analytic_variance == consensus_variance(params, x0).variance
            if row.stderr > 0:
                assert abs(row.empirical_variance - row.analytic_variance) <= 6 * row.stderr

    def test_rejects_sizes_below_c(self):
        with pytest.raises(ValueError):
            sweep_fixed_degree(5.0, range(3, 6), reps=10, seed=0)

    def test_reproducible_and_thread_invariant(self):
        a = sweep_fixed_degree(5.0, range(5, 7), reps=120, seed=3)
        b = sweep_fixed_degree(5.0, range(5, 7), reps=120, seed=3)
        c = sweep_fixed_degree(5.0, range(5, 7), reps=120, seed=3, threads=4)
        assert a == b == c


class TestFactorSweep:
    def test_groups_and_endpoints(self):
        rows = factor_sweep([5, 6, 7, 8, 9, 10], range(5, 71))
        cs = sorted({row.c for row in rows})
        assert cs == [5.0, 6.0, 7.0, 8.0, 9.0, 10.0]
        for c in cs:
            group = [row for row in rows if row.c == c]
            assert group[0].n == int(c)
            assert group[0].factor == 0.0
            assert group[-1].n == 70
            assert all(row.factor > 0.0 for row in group[1:])

    def test_sizes_below_c_skipped(self):
        rows = factor_sweep([10.0], range(5, 12))
        assert [row.n for row in rows] == [10, 11]

    def test_matches_direct_factor(self):
        rows = factor_sweep([4.0], range(4, 9))
        for row in rows[1:]:
            assert row.factor == variance_factor(ModelParams(row.n, 4.0 / row.n))


class TestEnsembleStatsShape:
    def test_fields(self):
        stats = run_ensemble(_config(reps=16))
        assert isinstance(stats, EnsembleStats)
        assert stats.reps_used == 16
        assert stats.variance >= 0.0
        assert stats.stderr_variance >= 0.0
