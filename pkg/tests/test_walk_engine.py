import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from counterwalk.verify import brute_force_walk_pmf, tv_distance
from counterwalk.walk_engine import (
    StepLaw,
    decompose,
    forest_census,
    parse_mu_spec,
    representation_residual,
    simulate,
    simulate_batch,
    simulate_seeded,
)

ALL_LAWS = (
    StepLaw.rademacher(),
    StepLaw.dirac(1),
    StepLaw.uniform_symmetric(),
    StepLaw.gaussian(0, 1),
    StepLaw.pareto_symmetric(Fraction(3, 2)),
)


class TestStepLaw:
    def test_spec_round_trip(self):
        for law in ALL_LAWS + (StepLaw.dirac(Fraction(3, 2)), StepLaw.gaussian(Fraction(1, 2), 2)):
            again = parse_mu_spec(law.spec_string())
            assert again == law

    def test_grammar_accepts_fractions_and_decimals(self):
        assert parse_mu_spec("dirac:1/2").params[0] == Fraction(1, 2)
        assert parse_mu_spec("dirac:0.25").params[0] == Fraction(1, 4)
        assert parse_mu_spec("gauss:0,1").m2 == 1
        assert parse_mu_spec("pareto:1.5").params[0] == Fraction(3, 2)

    def test_grammar_rejects_garbage(self):
        for bad in ("cauchy", "dirac", "dirac:x", "gauss:1", "gauss:1,2,3", "pareto:0", "pareto:-1", "uniform:3"):
            with pytest.raises(ValueError):
                parse_mu_spec(bad)

    def test_gaussian_rejects_negative_variance(self):
        with pytest.raises(ValueError):
            StepLaw.gaussian(0, -1)

    def test_exact_moments(self):
        assert (StepLaw.rademacher().m1, StepLaw.rademacher().m2) == (0, 1)
        law = StepLaw.dirac(Fraction(3, 2))
        assert (law.m1, law.m2) == (Fraction(3, 2), Fraction(9, 4))
        assert StepLaw.uniform_symmetric().m2 == Fraction(1, 3)
        assert StepLaw.gaussian(2, 3).m2 == 7

    def test_pareto_moment_availability(self):
        assert StepLaw.pareto_symmetric(Fraction(3, 2)).m1 == 0
        assert StepLaw.pareto_symmetric(Fraction(3, 2)).m2 is None
        assert StepLaw.pareto_symmetric(Fraction(4, 5)).m1 is None
        assert StepLaw.pareto_symmetric(3).m2 == 3

    def test_pareto_magnitudes_at_least_scale(self):
        law = StepLaw.pareto_symmetric(Fraction(3, 2))
        rng = random.Random(0)
        assert all(abs(law.sample(rng)) >= 1.0 for _ in range(200))
        batch = law.sample_batch(np.random.default_rng(0), 1000)
        assert np.all(np.abs(batch) >= 1.0)


class TestSimulate:
    def test_rejects_bad_arguments(self):
        rng = random.Random(0)
        with pytest.raises(ValueError):
            simulate(0, Fraction(1, 2), StepLaw.dirac(1), rng)
        with pytest.raises(ValueError):
            simulate(5, Fraction(3, 2), StepLaw.dirac(1), rng)

    def test_first_step_is_always_an_innovation(self):
        for seed in range(5):
            run = simulate_seeded(20, Fraction(0), StepLaw.rademacher(), seed)
            assert run.eps[0] == 1
            assert run.i_of_n[0] == 1

    def test_innovation_count_tracks_bits(self):
        run = simulate_seeded(200, Fraction(1, 3), StepLaw.dirac(1), 3)
        running = 0
        for bit, i_n in zip(run.eps, run.i_of_n):
            running += bit
            assert i_n == running
        assert len(run.x) == run.innovations

    def test_pick_only_drawn_when_counterbalancing(self):
        run = simulate_seeded(100, Fraction(1, 2), StepLaw.dirac(1), 4)
        for m in range(2, 101):
            if run.eps[m - 1]:
                assert run.v[m - 1] is None
            else:
                assert 1 <= run.v[m - 1] <= m - 1

    def test_pure_innovation_is_plain_random_walk(self):
        run = simulate_seeded(100, Fraction(1), StepLaw.rademacher(), 7)
        assert run.x_check == run.x == run.x_hat
        assert run.final_check == sum(run.x)
        parts = decompose(run)
        assert set(parts) == {1}
        assert parts[1] == run.final_check

    def test_pure_counterbalance_follows_tree_parity(self):
        run = simulate_seeded(300, Fraction(0), StepLaw.dirac(1), 11)
        assert run.innovations == 1
        partial = 0
        for m in range(1, 301):
            partial += 1 - 2 * run.parity[m - 1]
            assert run.s_check[m - 1] == partial
        census = forest_census(run)
        assert run.final_check == census.delta_per_tree[0]

    def test_coupling_and_sign_rule(self):
        for law in ALL_LAWS:
            run = simulate_seeded(400, Fraction(1, 3), law, 21)
            for xc, xh, par in zip(run.x_check, run.x_hat, run.parity):
                assert abs(xc) == abs(xh)
                if par == 0:
                    assert xc == xh
                else:
                    assert xc == -xh

    def test_parity_matches_independent_reconstruction(self):
        run = simulate_seeded(300, Fraction(2, 5), StepLaw.dirac(1), 33)
        parity = [0] * (run.n + 1)
        for m in range(1, run.n + 1):
            if run.eps[m - 1]:
                parity[m] = 0
            else:
                parity[m] = parity[run.v[m - 1]] ^ 1
        assert run.parity == [parity[m] for m in range(1, run.n + 1)]

    def test_reinforced_walk_of_unit_masses_is_deterministic(self):
        # constant step draws make the reinforced sum exactly the step index
        run = simulate_seeded(250, Fraction(1, 2), StepLaw.dirac(1), 8)
        assert run.s_hat == list(range(1, 251))

    def test_determinism(self):
        a = simulate_seeded(1000, Fraction(1, 2), StepLaw.gaussian(0, 1), 77)
        b = simulate_seeded(1000, Fraction(1, 2), StepLaw.gaussian(0, 1), 77)
        assert a.s_check == b.s_check
        assert a.eps == b.eps and a.v == b.v and a.x == b.x
        c = simulate_seeded(1000, Fraction(1, 2), StepLaw.gaussian(0, 1), 78)
        assert c.s_check != a.s_check


class TestForestCensus:
    @given(
        st.integers(min_value=0, max_value=2**32 - 1),
        st.sampled_from([Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(9, 10), Fraction(1)]),
        st.integers(min_value=1, max_value=300),
    )
    @settings(max_examples=40, deadline=None)
    def test_counting_invariants(self, seed, p, n):
        run = simulate_seeded(n, p, StepLaw.rademacher(), seed)
        census = forest_census(run, shape_cap=4)
        assert sum(k * cnt for k, cnt in census.nu.items()) == n
        assert sum(census.nu.values()) == run.innovations
        assert sum(census.occurrences) == n
        assert len(census.occurrences) == run.innovations
        # shapes of size <= cap partition the size classes they cover
        for k in range(1, 5):
            shape_total = sum(
                cnt for seq, cnt in census.nu_shape.items() if len(seq) + 1 == k
            )
            assert shape_total == census.nu.get(k, 0)

    def test_deltas_bounded_by_sizes(self):
        run = simulate_seeded(500, Fraction(1, 3), StepLaw.dirac(1), 5)
        census = forest_census(run)
        for size, delta in zip(census.occurrences, census.delta_per_tree):
            assert abs(delta) <= size
            assert (delta - size) % 2 == 0

    def test_singleton_fraction_near_limit(self):
        n = 100_000
        run = simulate_seeded(n, Fraction(1, 2), StepLaw.dirac(1), 17)
        census = forest_census(run, shape_cap=1)
        nu1 = census.nu.get(1, 0)
        # crude Poisson-scale band around n/3
        assert abs(nu1 - n / 3) <= 4 * math.sqrt(n / 3)

    def test_conditional_shape_law_is_uniform(self):
        # given its size, a genealogical tree is uniform over the
        # (k-1)! increasing shapes of that size
        from scipy.stats import chisquare

        run = simulate_seeded(100_000, Fraction(1, 2), StepLaw.dirac(1), 4242)
        census = forest_census(run, shape_cap=4)
        for k in (3, 4):
            counts = [cnt for seq, cnt in census.nu_shape.items() if len(seq) + 1 == k]
            assert len(counts) == math.factorial(k - 1)
            _, pvalue = chisquare(counts)
            assert pvalue > 1e-3


class TestDecompose:
    def test_reconstructs_exactly_for_exact_laws(self):
        for law in (StepLaw.dirac(1), StepLaw.rademacher(), StepLaw.dirac(Fraction(1, 2))):
            run = simulate_seeded(400, Fraction(1, 3), law, 2)
            parts = decompose(run)
            assert sum(parts.values()) == run.final_check

    def test_reconstructs_to_tolerance_for_float_laws(self):
        run = simulate_seeded(10_000, Fraction(1, 2), StepLaw.gaussian(0, 1), 3)
        parts = decompose(run)
        gap = abs(sum(parts.values()) - run.final_check)
        assert gap <= 1e-9 * (1 + abs(run.final_check))

    def test_pair_component_vanishes(self):
        # two-vertex trees have one even and one odd vertex, so they cancel
        for seed in range(5):
            run = simulate_seeded(300, Fraction(1, 2), StepLaw.gaussian(0, 1), seed)
            parts = decompose(run)
            if 2 in parts:
                assert parts[2] == 0


class TestRepresentationResidual:
    def test_exact_laws_have_zero_residual(self):
        for law in (StepLaw.dirac(1), StepLaw.rademacher()):
            for seed in range(5):
                run = simulate_seeded(2000, Fraction(1, 4), law, seed)
                assert representation_residual(run) == 0

    def test_float_laws_stay_below_relative_band(self):
        for seed in range(3):
            run = simulate_seeded(20_000, Fraction(1, 2), StepLaw.gaussian(0, 1), seed)
            res = float(representation_residual(run))
            assert res <= 1e-9 * (1 + abs(float(run.final_check)))


class TestBatch:
    def test_deterministic(self):
        a = simulate_batch(50, Fraction(1, 2), StepLaw.rademacher(), 500, 42)
        b = simulate_batch(50, Fraction(1, 2), StepLaw.rademacher(), 500, 42)
        assert np.array_equal(a.s_check, b.s_check)
        assert np.array_equal(a.nu_k, b.nu_k)

    def test_census_invariants(self):
        batch = simulate_batch(8, Fraction(1, 2), StepLaw.dirac(1), 2000, 1, nu_kmax=8)
        sizes = np.arange(1, 9)
        assert np.all((batch.nu_k * sizes).sum(axis=1) == 8)
        assert np.all(batch.nu_k.sum(axis=1) == batch.i_n)
        assert np.array_equal(batch.nu1, batch.nu_k[:, 0])
        assert np.all(batch.i_n >= 1) and np.all(batch.i_n <= 8)

    def test_unit_mass_reinforced_sum_is_horizon(self):
        batch = simulate_batch(30, Fraction(1, 3), StepLaw.dirac(1), 300, 9)
        assert np.allclose(batch.s_hat, 30.0)

    def test_extreme_innovation_rates(self):
        ones = simulate_batch(10, Fraction(1), StepLaw.dirac(1), 100, 5)
        assert np.all(ones.i_n == 10)
        assert np.allclose(ones.s_check, 10.0)
        zeros = simulate_batch(10, Fraction(0), StepLaw.dirac(1), 100, 5)
        assert np.all(zeros.i_n == 1)

    def test_matches_exhaustive_law(self):
        pmf = brute_force_walk_pmf(5, Fraction(1, 2), StepLaw.rademacher())
        batch = simulate_batch(5, Fraction(1, 2), StepLaw.rademacher(), 20_000, 77, census=False)
        values, counts = np.unique(np.rint(batch.s_check).astype(int), return_counts=True)
        hist = {int(v): int(c) for v, c in zip(values, counts)}
        assert tv_distance(hist, pmf) <= 0.05

    def test_sum_delta_sq_consistent_with_check_sum(self):
        # for a unit point mass the walk equals the sum of per-tree deltas
        batch = simulate_batch(40, Fraction(1, 2), StepLaw.dirac(1), 500, 13)
        assert batch.sum_delta_sq is not None
        assert np.all(batch.sum_delta_sq >= 1.0)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            simulate_batch(0, Fraction(1, 2), StepLaw.dirac(1), 10, 0)
        with pytest.raises(ValueError):
            simulate_batch(5, Fraction(1, 2), StepLaw.dirac(1), 0, 0)
        with pytest.raises(ValueError):
            simulate_batch(5, 2, StepLaw.dirac(1), 10, 0)
