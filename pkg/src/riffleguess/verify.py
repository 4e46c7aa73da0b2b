"""Replay the closed forms against their enumeration oracles.

Each check returns a :class:`Check`; ``run_suite`` never raises on a
mismatch so that a full report is always produced.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import analysis as an
from . import shuffle as sh
from . import strategy as st

__all__ = ["Check", "run_suite", "SUITES"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


def _check(name: str, fn: Callable[[], tuple[bool, str] | bool]) -> Check:
    try:
        out = fn()
    except Exception as exc:  # noqa: BLE001 - a crashing check is a failed check
        return Check(name, False, f"{type(exc).__name__}: {exc}")
    if isinstance(out, tuple):
        return Check(name, bool(out[0]), out[1])
    return Check(name, bool(out))


def _distribution_law(K):
    for n in range(1, K + 1):
        law = sh.word_distribution(n)
        Q = sh.closed_form_Q(n)
        support = set(law)
        if support != set(sh.iter_support(n)):
            return False, f"support mismatch at n={n}"
        if any(Q.probability(p) != q for p, q in law.items()):
            return False, f"probability mismatch at n={n}"
        direct = sum(sh.rising_sequence_count(p) == 2 for p in itertools.permutations(range(1, n + 1)))
        if direct != sh.count_rs2(n):
            return False, f"R_{n}: {direct} != {sh.count_rs2(n)}"
    return True, f"n <= {K}"


def _transition(K):
    for n in range(1, K + 1):
        P = sh.transition_matrix(n)
        if P != sh.enumerated_transition_matrix(n):
            return False, f"n={n}"
        if any(s != 1 for s in P.row_sums() + P.column_sums()):
            return False, f"not doubly stochastic at n={n}"
    return True, f"n <= {K}"


def _conditional_g(K):
    for n in range(1, K + 1):
        cond = sh.conditioned_on_first_card(sh.word_distribution(n + 1), 1)
        if cond != sh.conditional_Q_g(n).to_table():
            return False, f"n={n}"
    return True, f"n <= {K}"


def _tv(K):
    for n in range(1, 31):
        want = Fraction(2**n - n - 1, (2**n + 1) * 2**n)
        if sh.tv_distance(sh.closed_form_Q(n), sh.conditional_Q_g(n)) != want:
            return False, f"closed form at n={n}"
    for n in range(1, K + 1):
        f, g = sh.closed_form_Q(n), sh.conditional_Q_g(n)
        if sh.tv_distance(f, g) != sh.tv_distance_tables(f.to_table(), g.to_table()):
            return False, f"table L1 at n={n}"
    return True, f"closed form n <= 30, tables n <= {K}"


def _entropy(K):
    import mpmath

    worst = max(
        abs(sh.entropy_Q(n) - sh.enumerated_entropy(sh.word_distribution(n))) for n in range(1, K + 1)
    )
    return worst < mpmath.mpf("1e-12"), f"max deviation {mpmath.nstr(worst, 3)}"


def _optimality(K):
    for n in range(1, K + 1):
        a = st.expected_reward(st.OptimalStrategy(), sh.closed_form_Q(n))
        b = st.greedy_bayes_expected_reward(n)
        if a != b:
            return False, f"n={n}: {a} != {b}"
    return True, f"n <= {K}"


def _tie_break(K):
    for n in range(1, K + 1):
        Q = sh.closed_form_Q(n)
        if st.expected_reward(st.OptimalStrategy("low"), Q) != st.expected_reward(st.OptimalStrategy("high"), Q):
            return False, f"n={n}"
    return True, f"n <= {K}"


def _ladder(K):
    spot = (an.exact_G_ladder(1), an.exact_G_ladder(2), an.exact_G_ladder(3))
    if spot != (1, Fraction(7, 4), Fraction(19, 8)):
        return False, f"spot values {spot}"
    for n in range(1, K + 1):
        if an.exact_G_ladder(n) != st.expected_reward(st.OptimalStrategy(), sh.closed_form_Q(n)):
            return False, f"G({n})"
        if an.g_shuffle_reward(n) != st.expected_reward(st.OptimalStrategy(), sh.conditional_Q_g(n)):
            return False, f"R*(g_{n})"
    return True, f"n <= {K}"


def _dp():
    for a in range(7):
        for b in range(7):
            if an.f_dp(a, b) != an.f_bruteforce(a, b):
                return False, f"f({a},{b})"
    for n in range(1, 41):
        if an.s_sequence(n) != an.s_definitional(n):
            return False, f"S({n})"
    worst = max(abs(float(an.big_F(n)) - an.big_F(n, "float")) for n in range(1, 201))
    return worst < 1e-12, f"F dual-mode max deviation {worst:.2e}"


def _consecutive(K):
    for n in range(1, 31):
        for m in range(1, n + 1):
            if not an.consecutive_stage_probability(n, m) > Fraction(1, 2):
                return False, f"({n},{m}) not above 1/2"
    for n in range(1, K + 1):
        for m in range(1, n + 1):
            if an.consecutive_stage_probability(n, m) != an.enumerated_consecutive_probability(n, m):
                return False, f"({n},{m})"
    return True, f"above 1/2 for n <= 30, enumeration n <= {K}"


def _second_moment():
    T, var = an.second_moment_enumeration(3)
    return (T, var) == (Fraction(49, 8), Fraction(31, 64)), f"T*(3)={T}, var={var}"


def _fg_gap():
    for n in range(1, 31):
        gap = abs(an.exact_G_ladder(n) - an.g_shuffle_reward(n))
        if gap > 2 * n * sh.tv_distance(sh.closed_form_Q(n), sh.conditional_Q_g(n)):
            return False, f"n={n}"
    return True, "n <= 30"


def _error_term():
    G = an.G_float_table(10000)
    n = np.arange(1, 10001)
    errs = np.abs(G[1:] - an.asymptotic_target(n))
    worst = float(errs.max())
    at = int(n[errs.argmax()])
    return worst < 0.5, f"max |G(n) - target| = {worst:.6f} at n={at}"


def run_suite(max_n: int = 12) -> list[Check]:
    """Full check list, with enumeration checks capped at ``max_n`` (and at each check's own limit)."""
    if max_n < 1:
        raise ValueError("max-n must be positive")
    k8, k10, k16 = min(max_n, 8), min(max_n, 10), min(max_n, 16)
    return [
        _check("rising sequence example", lambda: sh.rising_sequence_count([1, 4, 2, 5, 3, 6]) == 2),
        _check("one-shuffle law and R_n", lambda: _distribution_law(k8)),
        _check("placement matrix", lambda: _transition(k8)),
        _check("conditional law g_n", lambda: _conditional_g(k8)),
        _check("total variation", lambda: _tv(k10)),
        _check("entropy", lambda: _entropy(k10)),
        _check("optimality vs greedy posterior", lambda: _optimality(k10)),
        _check("tie-break invariance", lambda: _tie_break(k10)),
        _check("ladder vs enumeration", lambda: _ladder(k16)),
        _check("interleave DP, S(n), F(n)", _dp),
        _check("consecutive stage", lambda: _consecutive(k10)),
        _check("second moment n=3", _second_moment),
        _check("f vs g reward gap", _fg_gap),
        _check("error term below 0.5 for n <= 10000", _error_term),
    ]


SUITES = {"paper": run_suite}
