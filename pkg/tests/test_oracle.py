import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from truncvendi.entropy import transformed_score, truncated_vendi_score
from truncvendi.errors import InfiniteDimensionalKernel, InvalidParams, IoFailure, PreconditionViolated
from truncvendi.kernels import KernelSpec, gram_matrix
from truncvendi.oracle import (
    STATEMENTS,
    BoundQuery,
    DiscreteDistribution,
    load_distribution,
    monte_carlo_check,
    population_spectrum,
    population_vendi,
    sample_from,
    sample_indices,
    save_distribution,
    theoretical_bound,
)
from truncvendi.spectra import ORACLE, spectrum_from_gram

from helpers import orthonormal_rows

COS = KernelSpec.cosine()


def _full_query(statement, n, delta, alpha=None):
    # parameters that satisfy every precondition for the given statement
    defaults = {
        "thm1": dict(alpha=1.0),
        "cor1": dict(alpha=2.0),
        "cor2a": dict(alpha=1.0, d=8),
        "cor2b": dict(alpha=1.5, d=8),
        "thm2": dict(alpha=1.5, t=16),
        "thm3a": dict(alpha=2.0, t=64),
        "thm3b": dict(alpha=2.0, t=64, tau=1.0, r=2),
    }[statement]
    if alpha is not None:
        defaults["alpha"] = alpha
    return BoundQuery(statement, n, delta, **defaults)


class TestDistribution:
    def test_validation(self):
        with pytest.raises(InvalidParams):
            DiscreteDistribution(np.eye(2), [0.5, 0.6])
        with pytest.raises(InvalidParams):
            DiscreteDistribution(np.eye(2), [1.0])
        with pytest.raises(InvalidParams):
            DiscreteDistribution(np.eye(2), [1.5, -0.5])

    def test_tolerance(self):
        DiscreteDistribution(np.eye(3), [1 / 3] * 3)
        with pytest.raises(InvalidParams):
            DiscreteDistribution(np.eye(2), [0.5, 0.5 + 1e-10])

    def test_round_trip(self, tmp_path):
        d = DiscreteDistribution(np.arange(6.0).reshape(3, 2) / 7, [0.2, 0.3, 0.5], "toy")
        path = tmp_path / "d.json"
        save_distribution(d, path)
        back = load_distribution(path)
        assert back.label == "toy"
        assert np.array_equal(back.support, d.support) and np.array_equal(back.probs, d.probs)

    def test_load_errors(self, tmp_path):
        with pytest.raises(IoFailure):
            load_distribution(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(InvalidParams):
            load_distribution(bad)
        bad.write_text('{"support": [[1, 0]]}')
        with pytest.raises(InvalidParams, match="probs"):
            load_distribution(bad)


class TestPopulationSpectrum:
    def test_uniform_orthogonal(self):
        s = population_spectrum(DiscreteDistribution.uniform(np.eye(2)), COS)
        np.testing.assert_allclose(s.values, [0.5, 0.5], atol=1e-15)
        assert s.source == ORACLE

    def test_single_atom(self):
        s = population_spectrum(DiscreteDistribution([[0.3, 0.4]], [1.0]), KernelSpec.gaussian(1))
        np.testing.assert_allclose(s.values, [1.0])

    def test_weighted(self):
        s = population_spectrum(DiscreteDistribution(np.eye(2), [0.25, 0.75]), COS)
        np.testing.assert_allclose(s.values, [0.75, 0.25], atol=1e-15)

    def test_trace_one(self, rng):
        p = rng.dirichlet(np.ones(9))
        d = DiscreteDistribution(rng.standard_normal((9, 4)), p / p.sum())
        s = population_spectrum(d, KernelSpec.gaussian(0.8))
        assert s.raw_sum == pytest.approx(1.0, abs=1e-12)

    def test_duplicate_atoms_merge(self):
        split = DiscreteDistribution(np.array([[1.0, 0], [1.0, 0], [0, 1.0]]), [0.25, 0.25, 0.5])
        merged = DiscreteDistribution(np.eye(2), [0.5, 0.5])
        np.testing.assert_allclose(population_spectrum(split, COS).padded(3)[:2],
                                   population_spectrum(merged, COS).values, atol=1e-14)

    def test_empirical_distribution_matches_gram(self, rng):
        for spec in (COS, KernelSpec.gaussian(1.3)):
            X = rng.standard_normal((40, 5))
            emp = population_spectrum(DiscreteDistribution.uniform(X), spec)
            gram = spectrum_from_gram(gram_matrix(spec, X))
            np.testing.assert_allclose(emp.values, gram.values, atol=1e-10)


class TestPopulationVendi:
    @pytest.mark.parametrize("k", [1, 3, 7])
    def test_uniform_orthogonal(self, k):
        rep = population_vendi(DiscreteDistribution.uniform(orthonormal_rows(k, 8)), COS)
        assert rep.score == pytest.approx(k, abs=1e-12)
        assert rep.n == k

    def test_order_two(self):
        rep = population_vendi(DiscreteDistribution(np.eye(2), [0.75, 0.25]), COS, alpha=2)
        assert rep.score == pytest.approx(1 / (0.5625 + 0.0625), rel=1e-12)
        assert rep.score == pytest.approx(1.6, rel=1e-12)

    def test_truncation_noop(self, rng):
        d = DiscreteDistribution.uniform(rng.standard_normal((6, 3)))
        spec = KernelSpec.gaussian(1.0)
        full = population_vendi(d, spec, 1.5).score
        for t in (6, 7, 20):
            rep = population_vendi(d, spec, 1.5, t=t)
            assert rep.score == pytest.approx(full, rel=1e-10)
            assert rep.t == t


class TestSampling:
    def test_single_atom(self):
        X = sample_from(DiscreteDistribution([[1.0, 2.0]], [1.0]), 5, seed=0)
        assert np.array_equal(X, np.tile([1.0, 2.0], (5, 1)))

    def test_deterministic(self, rng):
        d = DiscreteDistribution.uniform(rng.standard_normal((5, 2)))
        assert np.array_equal(sample_from(d, 50, 3), sample_from(d, 50, 3))
        assert not np.array_equal(sample_from(d, 50, 3), sample_from(d, 50, 4))

    def test_frequencies(self):
        d = DiscreteDistribution.uniform(np.eye(4))
        counts = np.bincount(sample_indices(d, 100_000, 11), minlength=4) / 100_000
        # binomial sd ~ 0.0014
        np.testing.assert_allclose(counts, 0.25, atol=0.01)

    def test_zero_probability_never_drawn(self):
        d = DiscreteDistribution(np.eye(3), [0.5, 0.0, 0.5])
        assert 1 not in sample_indices(d, 10_000, 1)

    def test_invalid_n(self):
        with pytest.raises(InvalidParams):
            sample_from(DiscreteDistribution.uniform(np.eye(2)), 0, 1)


class TestTheoreticalBound:
    def test_thm1_value(self):
        value = theoretical_bound(BoundQuery("thm1", 512, 0.1))
        assert value == pytest.approx(math.sqrt(32 * math.log(20) / 512), rel=1e-15)
        assert value == pytest.approx(0.4327046, abs=1e-7)

    @pytest.mark.parametrize("t", [1, 8, 100])
    def test_thm2_collapses_at_order_two(self, t):
        assert theoretical_bound(BoundQuery("thm2", 512, 0.1, 2.0, t=t)) == pytest.approx(
            theoretical_bound(BoundQuery("thm1", 512, 0.1)), rel=1e-15)

    def test_thm1_precondition(self):
        with pytest.raises(PreconditionViolated, match="2 \\+ 8 ln"):
            theoretical_bound(BoundQuery("thm1", 3, 0.5))
        theoretical_bound(BoundQuery("thm1", 8, 0.5))

    def test_closed_forms(self):
        L = math.log(20)
        assert theoretical_bound(BoundQuery("cor2a", 5000, 0.1, d=8)) == pytest.approx(
            math.sqrt(8 * 8 * L / 5000) * math.log(5000 * 8 / (32 * L)))
        assert theoretical_bound(BoundQuery("cor2b", 5000, 0.1, 1.5, d=8)) == pytest.approx(
            math.sqrt(32 * 8**0.5 * L / 5000))
        assert theoretical_bound(BoundQuery("thm2", 2048, 0.1, 1.5, t=32)) == pytest.approx(
            math.sqrt(32 * 32**0.5 * L / 2048))
        assert theoretical_bound(BoundQuery("thm3a", 2048, 0.1, 3.0, t=500)) == pytest.approx(
            math.sqrt(128 * math.log(30) / 500))
        assert theoretical_bound(BoundQuery("cor1", 512, 0.1, 2.0)) == pytest.approx(
            math.sqrt(32 * L / 512))

    def test_thm3b(self):
        n, t, tau = 100_000, 64, 1.0
        expected = math.sqrt(math.log(20) * t * tau**2 * math.log(n) ** 2 / n)
        assert theoretical_bound(BoundQuery("thm3b", n, 0.1, 2.0, t=t, tau=tau, r=2)) == pytest.approx(expected)
        with pytest.raises(PreconditionViolated, match="r tau ln"):
            theoretical_bound(BoundQuery("thm3b", n, 0.1, 2.0, t=10, tau=1.0, r=2))

    def test_shannon_forms(self):
        eps = math.sqrt(32 * math.log(20) / 100_000)
        got = theoretical_bound(BoundQuery("thm2", 100_000, 0.1, 1.0, t=16))
        assert got == pytest.approx(eps * 4 * math.log(4 / eps))

    def test_cor2a_precondition(self):
        with pytest.raises(PreconditionViolated, match="32 e"):
            theoretical_bound(BoundQuery("cor2a", 500, 0.1, d=8))

    def test_missing_fields(self):
        with pytest.raises(PreconditionViolated, match="requires d"):
            theoretical_bound(BoundQuery("cor2b", 500, 0.1, 1.5))
        with pytest.raises(PreconditionViolated, match="requires t"):
            theoretical_bound(BoundQuery("thm2", 500, 0.1, 1.5))
        with pytest.raises(PreconditionViolated, match="requires tau"):
            theoretical_bound(BoundQuery("thm3b", 500, 0.1, 2.0, t=50))

    def test_order_restrictions(self):
        with pytest.raises(PreconditionViolated):
            theoretical_bound(BoundQuery("cor1", 512, 0.1, 1.5))
        with pytest.raises(PreconditionViolated):
            theoretical_bound(BoundQuery("cor2b", 512, 0.1, 2.5, d=4))

    def test_bad_inputs(self):
        with pytest.raises(InvalidParams):
            theoretical_bound(BoundQuery("thm9", 512, 0.1))
        with pytest.raises(PreconditionViolated):
            theoretical_bound(BoundQuery("thm1", 512, 1.5))

    @pytest.mark.parametrize("statement", STATEMENTS)
    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(20_000, 10**7), k=st.integers(1, 10**6),
           delta=st.floats(0.01, 0.5), shrink=st.floats(0.1, 0.99))
    def test_monotone(self, statement, n, k, delta, shrink):
        base = theoretical_bound(_full_query(statement, n, delta))
        assert theoretical_bound(_full_query(statement, n + k, delta)) <= base * (1 + 1e-12)
        assert theoretical_bound(_full_query(statement, n, delta * shrink)) >= base * (1 - 1e-12)


class TestMonteCarlo:
    def test_single_atom_zero_distance(self):
        d = DiscreteDistribution([[1.0, 0.0]], [1.0])
        res = monte_carlo_check(d, COS, "thm1", 64, 5, 0.1, seed=0)
        assert res.violations == 0
        assert res.distances == pytest.approx([0.0] * 5, abs=1e-12)

    def test_reproducible_and_order_free(self):
        d = DiscreteDistribution.uniform(orthonormal_rows(4, 6))
        a = monte_carlo_check(d, COS, "thm1", 64, 6, 0.1, seed=5)
        b = monte_carlo_check(d, COS, "thm1", 64, 3, 0.1, seed=5)
        assert a.distances == monte_carlo_check(d, COS, "thm1", 64, 6, 0.1, seed=5).distances
        # trial i depends only on (seed, i), not on how many trials run
        assert a.distances[:3] == b.distances

    def test_thm1_small(self):
        d = DiscreteDistribution.uniform(orthonormal_rows(8))
        res = monte_carlo_check(d, COS, "thm1", 512, 20, 0.1, seed=1)
        assert res.bound == pytest.approx(0.432705, abs=1e-6)
        assert res.violations <= 2
        assert not res.asymptotic and res.violation_rate == res.violations / 20

    def test_cor2_needs_cosine(self):
        d = DiscreteDistribution.uniform(np.eye(3))
        with pytest.raises(InfiniteDimensionalKernel):
            monte_carlo_check(d, KernelSpec.gaussian(1), "cor2b", 64, 2, 0.1, alpha=1.5)

    def test_cor2b_runs(self):
        d = DiscreteDistribution.uniform(orthonormal_rows(4, 6))
        res = monte_carlo_check(d, COS, "cor2b", 256, 10, 0.1, alpha=1.5, seed=2)
        assert res.violations == 0

    def test_approximate_statements_run(self, rng):
        d = DiscreteDistribution.uniform(rng.standard_normal((6, 3)))
        spec = KernelSpec.gaussian(1.0)
        a = monte_carlo_check(d, spec, "thm3a", 300, 3, 0.1, alpha=2.0, t=64, seed=1)
        b = monte_carlo_check(d, spec, "thm3b", 300, 3, 0.1, alpha=2.0, t=40, tau=1.0, r=2, seed=1)
        assert len(a.distances) == 3 and b.asymptotic

    def test_law_of_large_numbers(self, rng):
        # 16 random atoms in d=8 under cosine, so both spectra are nontrivial
        dist = DiscreteDistribution.uniform(rng.standard_normal((16, 8)))
        alpha, t, n = 2.0, 6, 4096
        pop = population_vendi(dist, COS, alpha, t=t).score
        scores = [truncated_vendi_score(sample_from(dist, n, seed), COS, alpha, t).score for seed in range(20)]
        bound = theoretical_bound(BoundQuery("thm2", n, 0.1, alpha, t=t))
        gap = abs(transformed_score(np.mean(scores), alpha) - transformed_score(pop, alpha))
        assert gap <= bound
        # and the seed-mean is much closer than the bound
        assert abs(np.mean(scores) - pop) / pop < 0.02
