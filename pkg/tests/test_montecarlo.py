import json
import math
from fractions import Fraction

import numpy as np
import pytest

from riffleguess.analysis import exact_G_ladder
from riffleguess.montecarlo import (
    SimulationConfig,
    SimulationReport,
    counter_uint64,
    counter_uniform64,
    interleave_uniformity_test,
    optimal_rewards,
    run_trials,
    sample_permutations,
    sampler_equivalence_test,
)
from riffleguess.shuffle import drop_process_distribution, rising_sequence_count
from riffleguess.strategy import OptimalStrategy, play_with_feedback

CONSISTENCY_NS = [2, 3, 8, 16, 52]


# -- counter-based generator ------------------------------------------------------


def test_counter_streams_are_pure_functions():
    t = np.arange(10, dtype=np.uint64)
    a = counter_uint64(7, 1, t, 3)
    assert np.array_equal(a, counter_uint64(7, 1, t, 3))
    assert np.array_equal(a[4:], counter_uint64(7, 1, t[4:], 3))
    assert not np.array_equal(a, counter_uint64(8, 1, t, 3))
    assert not np.array_equal(a, counter_uint64(7, 2, t, 3))


def test_uniforms_in_unit_interval():
    u = counter_uniform64(1, 3, np.arange(100000, dtype=np.uint64), 2)
    assert u.min() >= 0 and u.max() < 1
    assert abs(u.mean() - 0.5) < 4 * math.sqrt(1 / 12 / u.size)


@pytest.mark.parametrize("sampler", ["binary_word", "two_step"])
def test_samples_are_one_shuffle_decks(sampler):
    decks = sample_permutations(9, 3, np.arange(2000, dtype=np.uint64), sampler)
    assert decks.shape == (2000, 9)
    for row in decks:
        assert sorted(row) == list(range(1, 10))
        assert rising_sequence_count(row.tolist()) <= 2


def test_sampler_rejects_unknown():
    with pytest.raises(ValueError):
        sample_permutations(3, 0, np.arange(2, dtype=np.uint64), "overhand")


# -- vectorised rewards -------------------------------------------------------------


@pytest.mark.parametrize("tie", ["low", "high"])
def test_vectorised_rewards_match_scalar_play(tie):
    decks = sample_permutations(11, 5, np.arange(3000, dtype=np.uint64))
    rewards = optimal_rewards(decks, tie)
    for row, r in zip(decks, rewards):
        assert play_with_feedback(OptimalStrategy(tie), row.tolist()).reward == r


# -- run_trials ----------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        SimulationConfig(3, 0, 1)
    with pytest.raises(ValueError):
        SimulationConfig(0, 10, 1)
    with pytest.raises(ValueError):
        SimulationConfig(3, 10, -1)
    with pytest.raises(ValueError):
        SimulationConfig(3, 10, 1, strategy="random")


def test_identical_config_identical_report():
    c = SimulationConfig(8, 150000, 42)
    a, b = run_trials(c), run_trials(c)
    assert a == b
    assert a.to_json() == b.to_json()


def test_report_independent_of_workers():
    c = SimulationConfig(16, 200000, 9, sampler="two_step")
    assert run_trials(c, workers=1).to_json() == run_trials(c, workers=2).to_json()


def test_report_independent_of_trial_count_prefix():
    # Trial t sees the same deck whatever the total count is.
    c_small = SimulationConfig(5, 1000, 3)
    decks_small = sample_permutations(5, 3, np.arange(1000, dtype=np.uint64))
    decks_big = sample_permutations(5, 3, np.arange(5000, dtype=np.uint64))
    assert np.array_equal(decks_small, decks_big[:1000])
    hist = run_trials(c_small).histogram
    values, counts = np.unique(optimal_rewards(decks_small), return_counts=True)
    assert hist == dict(zip(values.tolist(), counts.tolist()))


def test_histogram_consistency():
    r = run_trials(SimulationConfig(12, 70000, 1))
    assert sum(r.histogram.values()) == 70000
    mean = Fraction(sum(k * v for k, v in r.histogram.items()), 70000)
    assert abs(r.mean_reward - float(mean)) < 1e-9


def test_json_round_trip():
    r = run_trials(SimulationConfig(6, 5000, 11, strategy="greedy_bayes"))
    text = r.to_json()
    back = SimulationReport.from_dict(json.loads(text))
    assert back == r
    assert back.to_json() == text
    assert json.dumps(json.loads(text), sort_keys=True) == text


def test_histogram_csv():
    r = run_trials(SimulationConfig(3, 1000, 2))
    lines = r.histogram_csv().splitlines()
    assert lines[0] == "reward,count"
    assert sum(int(line.split(",")[1]) for line in lines[1:]) == 1000


def test_single_trial_has_zero_error():
    r = run_trials(SimulationConfig(4, 1, 0))
    assert r.standard_error == 0


@pytest.mark.parametrize(
    "n, exact", [(2, Fraction(7, 4)), (52, None)],
)
def test_mean_within_four_standard_errors(n, exact):
    exact = exact if exact is not None else exact_G_ladder(n)
    r = run_trials(SimulationConfig(n, 10**6, 2024))
    assert abs(r.mean_reward - float(exact)) <= 4 * r.standard_error


@pytest.mark.parametrize("strategy", ["optimal_high", "greedy_bayes"])
def test_other_strategies_agree_with_exact_value(strategy):
    trials = 10**6 if strategy == "optimal_high" else 40000
    r = run_trials(SimulationConfig(7, trials, 5, strategy=strategy))
    assert abs(r.mean_reward - float(exact_G_ladder(7))) <= 4 * r.standard_error


# -- uniformity and sampler equivalence ----------------------------------------------------


def test_uniformity_not_rejected():
    rep = interleave_uniformity_test(3, 4, 10**5, 17)
    assert rep.categories == math.comb(7, 3)
    assert sum(rep.counts) == 10**5
    assert rep.p_value > 0.001


def test_uniformity_degenerate():
    rep = interleave_uniformity_test(1, 0, 100, 0)
    assert rep.categories == 1
    assert rep.statistic == 0


def test_drop_tree_exact_for_two_two():
    law = drop_process_distribution(2, 2)
    assert len(law) == 6
    assert all(p == Fraction(1, 6) for p in law.values())


def test_uniformity_rejects_large_decks():
    with pytest.raises(ValueError):
        interleave_uniformity_test(7, 6, 10, 0)


def test_sampler_equivalence():
    _, p = sampler_equivalence_test(4, 10**6, 31)
    assert p > 0.001


# -- slow consistency suite ------------------------------------------------------------------


@pytest.mark.slow
@pytest.mark.parametrize("n", CONSISTENCY_NS)
def test_consistency_over_many_seeds(n):
    # 10**5 trials per seed keeps the 500 runs near a minute and a half.
    exact = float(exact_G_ladder(n))
    hits = 0
    for seed in range(100):
        r = run_trials(SimulationConfig(n, 10**5, 1000 + seed))
        hits += abs(r.mean_reward - exact) <= 4 * r.standard_error
    assert hits >= 99
