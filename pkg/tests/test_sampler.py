from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from switchset.dynamics import SchemeSpec
from switchset.model import epoch_mean, make_config
from switchset.sampler import (
    RNG_ALGORITHM,
    EpochObservation,
    PolicyKind,
    SwitchPolicy,
    evolve_and_sample,
    make_rng,
    next_switch_state,
    read_series_csv,
    sample_epoch,
    switch_path,
    write_series_csv,
)

CFG = make_config(5, 2, 3)


class TestSampleEpoch:
    def test_converges_to_epoch_mean(self):
        obs = sample_epoch(CFG, 3, 100_000, make_rng(7))
        assert abs(obs.sample_mean - 0.6) < 0.01

    def test_twenty_seeds(self):
        devs = []
        for seed in range(20):
            for s in range(CFG.n_C + 1):
                obs = sample_epoch(CFG, s, 100_000, make_rng(seed))
                devs.append(abs(obs.sample_mean - float(epoch_mean(CFG, s))))
        assert np.mean(devs) < 0.01

    def test_single_draw(self):
        rng = make_rng(0)
        for s in range(4):
            assert sample_epoch(CFG, s, 1, rng).sample_mean in (1.0, -1.0)

    def test_no_a_like_elements(self):
        obs = sample_epoch(make_config(0, 4, 0), 0, 50, make_rng(1))
        assert obs.count_A == 0 and obs.sample_mean == -1

    @pytest.mark.parametrize("s, draws", [(-1, 10), (4, 10), (0, 0)])
    def test_rejects(self, s, draws):
        with pytest.raises(ValueError):
            sample_epoch(CFG, s, draws, make_rng(0))

    def test_counts_consistent(self):
        obs = sample_epoch(CFG, 2, 999, make_rng(3))
        assert obs.count_A + obs.count_B == obs.draws == 999
        assert obs.sample_mean == (obs.count_A - obs.count_B) / 999

    def test_observation_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            EpochObservation(0, 0, 10, 3, 3)


class TestPolicies:
    def test_scheme_step(self):
        cfg = make_config(0, 0, 5)
        policy = SwitchPolicy.scheme_driven(cfg, "multiplicative", 2)
        assert next_switch_state(policy, 3, make_rng(0)) == 0

    def test_independent_extremes(self):
        rng = make_rng(0)
        never = SwitchPolicy.independent(CFG, 0.0)
        always = SwitchPolicy.independent(CFG, 1.0)
        for s in range(4):
            assert next_switch_state(never, s, rng) == 0
            assert next_switch_state(always, s, rng) == 3

    def test_uniform_covers_range(self):
        rng = make_rng(0)
        policy = SwitchPolicy.uniform(CFG)
        seen = {next_switch_state(policy, 0, rng) for _ in range(500)}
        assert seen == {0, 1, 2, 3}

    def test_scheme_modulus_must_match(self):
        with pytest.raises(ValueError):
            SwitchPolicy(PolicyKind.SCHEME, 3, scheme=SchemeSpec.collatz(3, 17))

    def test_bad_pi(self):
        with pytest.raises(ValueError):
            SwitchPolicy.independent(CFG, 1.5)

    def test_bad_initial(self):
        with pytest.raises(ValueError):
            SwitchPolicy.uniform(CFG, initial_s=4)

    def test_config_mismatch(self):
        policy = SwitchPolicy.uniform(make_config(1, 1, 4))
        with pytest.raises(ValueError):
            evolve_and_sample(CFG, policy, 3, 10, seed=0)

    def test_mirrored(self):
        p = SwitchPolicy.independent(CFG, 0.25, initial_s=1).mirrored()
        assert p.pi_A == 0.75 and p.initial_s == 2
        with pytest.raises(ValueError):
            SwitchPolicy.scheme_driven(CFG, "collatz", 3).mirrored()

    def test_switch_path_follows_scheme(self):
        policy = SwitchPolicy.scheme_driven(make_config(0, 0, 5), "multiplicative", 2, initial_s=1)
        assert switch_path(policy, 5, make_rng(0)) == [1, 2, 4, 2, 4]


class TestEvolve:
    def test_deterministic(self):
        policy = SwitchPolicy.independent(CFG, 0.4, initial_s=1)
        a = evolve_and_sample(CFG, policy, 12, 200, seed=99)
        b = evolve_and_sample(CFG, policy, 12, 200, seed=99)
        assert a == b
        assert write_series_csv(a) == write_series_csv(b)
        assert a.rng_algorithm == RNG_ALGORITHM

    def test_different_seeds_differ(self):
        policy = SwitchPolicy.uniform(CFG)
        a = evolve_and_sample(CFG, policy, 10, 200, seed=1)
        b = evolve_and_sample(CFG, policy, 10, 200, seed=2)
        assert a != b

    @pytest.mark.parametrize("kind, k", [("additive", 1), ("multiplicative", 3), ("collatz", 3)])
    def test_scheme_driven_stays_in_range(self, kind, k):
        policy = SwitchPolicy.scheme_driven(CFG, kind, k, initial_s=3)
        series = evolve_and_sample(CFG, policy, 10, 50, seed=5)
        assert len(series.epochs) == 10
        assert [e.epoch_index for e in series.epochs] == list(range(10))
        for e in series.epochs:
            assert 0 <= epoch_mean(CFG, e.s) <= Fraction(3, 5)
        # scheme applied once per epoch
        s = series.switch_counts()
        assert all(policy.scheme.step(a) == b for a, b in zip(s, s[1:]))

    def test_long_run_symmetric_average(self):
        cfg = make_config(4, 4, 6)
        series = evolve_and_sample(cfg, SwitchPolicy.independent(cfg, 0.5), 2000, 50, seed=11)
        assert abs(series.means().mean()) < 0.02

    def test_a_count_estimate_drifts_inside_bounds(self):
        for policy in (
            SwitchPolicy.uniform(CFG),
            SwitchPolicy.independent(CFG, 0.3),
            SwitchPolicy.scheme_driven(CFG, "collatz", 3, initial_s=3),
        ):
            series = evolve_and_sample(CFG, policy, 30, 20_000, seed=4)
            for e in series.epochs:
                assert 5 - 0.3 <= e.estimated_a_count(CFG.N) <= 8 + 0.3

    @pytest.mark.parametrize("epochs, draws", [(0, 10), (3, 0)])
    def test_rejects_sizes(self, epochs, draws):
        with pytest.raises(ValueError):
            evolve_and_sample(CFG, SwitchPolicy.uniform(CFG), epochs, draws, seed=0)


class TestCsv:
    def test_header(self):
        series = evolve_and_sample(CFG, SwitchPolicy.uniform(CFG), 3, 7, seed=0)
        assert write_series_csv(series).splitlines()[0] == "epoch,s,draws,count_a,count_b,mean"

    @settings(max_examples=30)
    @given(st.integers(0, 2**32), st.integers(1, 20), st.integers(1, 500))
    def test_round_trip(self, seed, epochs, draws):
        series = evolve_and_sample(CFG, SwitchPolicy.independent(CFG, 0.5), epochs, draws, seed)
        assert tuple(read_series_csv(write_series_csv(series))) == series.epochs

    def test_mean_has_twelve_digits(self):
        obs = EpochObservation(0, 0, 3, 2, 1)
        from switchset.sampler import SampleSeries

        text = write_series_csv(SampleSeries(CFG, "x", (obs,), 0))
        assert text.splitlines()[1].endswith(",0.333333333333")

    def test_rejects_tampered_mean(self):
        text = "epoch,s,draws,count_a,count_b,mean\n0,0,4,3,1,0.9\n"
        with pytest.raises(ValueError, match="line 2"):
            read_series_csv(text)

    def test_rejects_bad_header(self):
        with pytest.raises(ValueError):
            read_series_csv("a,b\n")
