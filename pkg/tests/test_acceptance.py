"""Acceptance criteria, one test each, at the stated tolerances and time limits.

The terminal summary lists a PASS/FAIL line per criterion.
"""

import itertools
import json
import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from riffleguess import analysis as an
from riffleguess import shuffle as sh
from riffleguess import strategy as st
from riffleguess.montecarlo import SimulationConfig, run_trials

FIXTURES = Path(__file__).parent / "fixtures"


class Clock:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.1f} s, limit {self.limit} s"


@pytest.mark.criterion(1, "one-shuffle law and R_n for n <= 8")
def test_distribution_law():
    with Clock(5):
        for n in range(1, 9):
            words = [sh.word_to_permutation(b).cards for b in itertools.product((0, 1), repeat=n)]
            law = {}
            for p in words:
                law[p] = law.get(p, 0) + Fraction(1, 2**n)
            identity = tuple(range(1, n + 1))
            assert law[identity] == Fraction(n + 1, 2**n)
            assert all(q == Fraction(1, 2**n) for p, q in law.items() if p != identity)
            assert law == sh.closed_form_Q(n).to_table()
            assert sh.count_rs2(n) == 2**n - n - 1 == len(law) - 1


@pytest.mark.criterion(2, "placement matrix closed form for n <= 8")
def test_transition_matrix():
    with Clock(5):
        for n in range(1, 9):
            P = sh.transition_matrix(n)
            assert P == sh.enumerated_transition_matrix(n)
            assert all(s == 1 for s in P.row_sums())
            assert all(s == 1 for s in P.column_sums())


@pytest.mark.criterion(3, "optimal strategy equals greedy posterior oracle for n <= 10")
def test_optimality():
    with Clock(120):
        for n in range(1, 11):
            assert st.expected_reward(st.OptimalStrategy(), sh.closed_form_Q(n)) == st.greedy_bayes_expected_reward(n)


@pytest.mark.criterion(4, "ladder equals enumeration for n <= 16")
def test_ladder():
    with Clock(120):
        assert an.exact_G_ladder(1) == 1
        assert an.exact_G_ladder(2) == Fraction(7, 4)
        assert an.exact_G_ladder(3) == Fraction(19, 8)
        for n in range(1, 17):
            assert an.exact_G_ladder(n, "rational") == st.expected_reward(st.OptimalStrategy(), sh.closed_form_Q(n))


@pytest.mark.criterion(5, "max |G(n) - n/2 - sqrt(2n/pi)| < 0.5 over n <= 10000")
def test_error_term_below_half():
    with Clock(60):
        G = an.G_float_table(10000)
        n = np.arange(1, 10001)
        err = np.abs(G[1:] - (n / 2 + math.sqrt(2 / math.pi) * np.sqrt(n)))
        worst = int(np.argmax(err))
        assert err.max() < 0.5, f"max |error| = {err.max():.6f} at n = {worst + 1}"


@pytest.mark.criterion(6, "total variation closed form")
def test_total_variation():
    with Clock(5):
        for n in range(1, 31):
            want = Fraction(2**n - n - 1, (2**n + 1) * 2**n)
            assert sh.tv_distance(sh.closed_form_Q(n), sh.conditional_Q_g(n)) == want
        for n in range(1, 11):
            f_law = sh.word_distribution(n)
            g_law = sh.conditioned_on_first_card(sh.word_distribution(n + 1), 1)
            l1 = sum(abs(f_law.get(p, 0) - g_law.get(p, 0)) for p in set(f_law) | set(g_law)) / 2
            assert l1 == sh.tv_distance(sh.closed_form_Q(n), sh.conditional_Q_g(n))


@pytest.mark.criterion(7, "interleave DP, S(n) and dual-mode F(n)")
def test_dp_and_series():
    with Clock(30):
        for a in range(7):
            for b in range(7):
                assert an.f_dp(a, b) == an.f_bruteforce(a, b)
        for n in range(1, 41):
            assert an.s_sequence(n) == an.s_definitional(n)
        for n in range(1, 201):
            assert abs(float(an.big_F(n, "rational")) - an.big_F(n, "float")) < 1e-12


@pytest.mark.criterion(8, "calibrated asymptotic envelopes over n <= 5000")
def test_envelopes():
    with Clock(60):
        fixture = json.loads((FIXTURES / "envelopes.json").read_text())
        assert fixture["max_n"] == 5000
        dev = an.envelope_deviations(5000)
        for name in ("A", "F", "zero_feedback"):
            assert np.abs(dev[name]).max() <= fixture["envelopes"][name] + 1e-9


@pytest.mark.criterion(9, "consecutive-stage probability above 1/2")
def test_consecutive_stage():
    with Clock(10):
        for n in range(1, 31):
            for m in range(1, n + 1):
                assert an.consecutive_stage_probability(n, m) > Fraction(1, 2)
        for n in range(1, 11):
            for m in range(1, n + 1):
                assert an.consecutive_stage_probability(n, m) == an.enumerated_consecutive_probability(n, m)


@pytest.mark.criterion(10, "Monte Carlo within 4 standard errors, worker-invariant")
def test_monte_carlo():
    with Clock(120):
        for n in (2, 3, 8, 16, 52):
            config = SimulationConfig(n, 10**6, 20240 + n)
            report = run_trials(config)
            exact = float(an.exact_G_ladder(n))
            assert abs(report.mean_reward - exact) <= 4 * report.standard_error, n
        again = run_trials(config, workers=2)
        assert again.to_json() == report.to_json()


@pytest.mark.criterion(11, "second moment n = 3 and tie-break invariance")
def test_second_moment_and_ties():
    with Clock(60):
        assert an.second_moment_enumeration(3) == (Fraction(49, 8), Fraction(31, 64))
        for n in range(1, 11):
            Q = sh.closed_form_Q(n)
            assert st.expected_reward(st.OptimalStrategy("low"), Q) == st.expected_reward(st.OptimalStrategy("high"), Q)
