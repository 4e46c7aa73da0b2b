import itertools
from collections import Counter, defaultdict
from fractions import Fraction

import pytest
from hypothesis import given, strategies as hst

from riffleguess.shuffle import Permutation, closed_form_Q, conditional_Q_g, transition_matrix, word_to_permutation
from riffleguess.strategy import (
    DeckExhaustedError,
    FunctionStrategy,
    GameState,
    GreedyBayesStrategy,
    ImpossibleDeckError,
    OptimalStrategy,
    advance_state,
    algo1_next_guess,
    expected_reward,
    greedy_bayes_expected_reward,
    greedy_bayes_guess,
    greedy_bayes_posterior,
    initial_state,
    play_with_feedback,
    posterior_table,
    zero_feedback_value,
    zero_feedback_value_float,
)
from riffleguess.analysis import a_sequence_float


def replay(n, history):
    state = initial_state(n)
    for card in history:
        state = advance_state(state, card)
    return state


# -- state machine -------------------------------------------------------------


def test_first_guess_is_one():
    assert algo1_next_guess(initial_state(5)) == 1


def test_tie_goes_to_low_pile():
    state = replay(7, [1, 2, 5])
    assert (state.low, state.high) == (range(3, 5), range(6, 8))
    assert algo1_next_guess(state) == 3
    assert algo1_next_guess(state, "high") == 6


def test_longer_pile_head():
    state = replay(7, [1, 2, 5, 6])
    assert (list(state.low), list(state.high)) == ([3, 4], [7])
    assert algo1_next_guess(state) == 3
    assert algo1_next_guess(state, "high") == 3


def test_advance_extends_prefix():
    assert advance_state(GameState(5, "consecutive", 2), 3) == GameState(5, "consecutive", 3)


def test_advance_splits_piles():
    state = advance_state(initial_state(5), 4)
    assert state.phase == "interleave"
    assert (list(state.low), list(state.high)) == ([1, 2, 3], [5])


def test_advance_split_with_empty_high_pile():
    state = advance_state(initial_state(4), 4)
    assert (list(state.low), list(state.high)) == ([1, 2, 3], [])


def test_advance_rejects_non_head():
    state = GameState(5, "interleave", 1, range(2, 4), range(5, 6))
    with pytest.raises(ImpossibleDeckError):
        advance_state(state, 3)


def test_advance_rejects_revealed_card():
    with pytest.raises(ImpossibleDeckError):
        advance_state(GameState(5, "consecutive", 2), 2)


def test_exhausted_deck():
    state = replay(2, [1, 2])
    with pytest.raises(DeckExhaustedError):
        algo1_next_guess(state)
    with pytest.raises(DeckExhaustedError):
        advance_state(replay(3, [2, 1, 3]), 1)


# -- play-throughs ---------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 4, 13])
def test_identity_scores_n(n):
    assert play_with_feedback(OptimalStrategy(), Permutation.identity(n)).reward == n


def test_swap_two_cards():
    t = play_with_feedback(OptimalStrategy(), [2, 1])
    assert [(s.guess, s.revealed, s.correct) for s in t.steps] == [(1, 2, False), (1, 1, True)]
    assert t.reward == 1


def test_trace_231():
    t = play_with_feedback(OptimalStrategy(), [2, 3, 1])
    assert [s.guess for s in t.steps] == [1, 1, 1]
    assert [s.correct for s in t.steps] == [False, False, True]
    assert t.reward == 1


def test_three_rising_sequences_raise():
    with pytest.raises(ImpossibleDeckError):
        play_with_feedback(OptimalStrategy(), [3, 2, 1])


@given(hst.lists(hst.integers(0, 1), min_size=1, max_size=30), hst.sampled_from(["low", "high"]))
def test_transcript_soundness(bits, tie):
    perm = word_to_permutation(bits)
    s = OptimalStrategy(tie)
    t = play_with_feedback(s, perm)
    assert tuple(step.revealed for step in t.steps) == perm.cards
    assert t.reward == sum(step.correct for step in t.steps)
    revealed = set()
    for step in t.steps:
        assert step.guess not in revealed
        revealed.add(step.revealed)
    replay(perm.n, perm.cards)


def test_history_call_matches_incremental_play():
    s = OptimalStrategy()
    perm = word_to_permutation([1, 0, 0, 1, 1, 0, 1])
    t = play_with_feedback(s, perm)
    for m, step in enumerate(t.steps):
        assert s(perm.cards[:m], perm.n) == step.guess


# -- expected reward -------------------------------------------------------------------


@pytest.mark.parametrize("n, value", [(1, Fraction(1)), (2, Fraction(7, 4)), (3, Fraction(19, 8))])
def test_expected_reward_small(n, value):
    assert expected_reward(OptimalStrategy(), closed_form_Q(n)) == value


def test_expected_reward_forced_single_card():
    always_one = FunctionStrategy(lambda history, n: 1)
    assert expected_reward(always_one, closed_form_Q(1)) == 1


def test_expected_reward_refuses_large_n():
    with pytest.raises(ValueError, match="ladder"):
        expected_reward(OptimalStrategy(), closed_form_Q(25))


def test_expected_reward_matches_word_average():
    n = 6
    total = sum(
        play_with_feedback(OptimalStrategy(), word_to_permutation(bits)).reward
        for bits in itertools.product((0, 1), repeat=n)
    )
    assert expected_reward(OptimalStrategy(), closed_form_Q(n)) == Fraction(total, 2**n)


@pytest.mark.parametrize("n", range(1, 11))
def test_tie_break_invariance(n):
    for d in (closed_form_Q(n), conditional_Q_g(n)):
        assert expected_reward(OptimalStrategy("low"), d) == expected_reward(OptimalStrategy("high"), d)


# -- greedy posterior oracle -------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_greedy_first_guess(n):
    assert greedy_bayes_guess((), n) == 1


@pytest.mark.parametrize("n, m", [(n, m) for n in range(2, 10) for m in range(1, n + 1)])
def test_greedy_consecutive_posterior(n, m):
    post = greedy_bayes_posterior(tuple(range(1, m)), n)
    assert post[m] == Fraction(2 ** (n - m) + m, 2 ** (n - m + 1) + m - 1)
    assert greedy_bayes_guess(tuple(range(1, m)), n) == m


def test_greedy_interleave_posterior():
    post = greedy_bayes_posterior((1, 2, 5, 6), 7)
    assert greedy_bayes_guess((1, 2, 5, 6), 7) == 3
    assert post == {3: Fraction(2, 3), 7: Fraction(1, 3)}


def test_greedy_rejects_impossible_history():
    with pytest.raises(ImpossibleDeckError):
        greedy_bayes_posterior((3, 2), 4)


@pytest.mark.parametrize("n", range(1, 11))
def test_optimal_matches_greedy_oracle(n):
    Q = closed_form_Q(n)
    assert expected_reward(OptimalStrategy(), Q) == greedy_bayes_expected_reward(n)


@pytest.mark.parametrize("n", range(1, 8))
def test_greedy_strategy_play_matches_tree_value(n):
    assert expected_reward(GreedyBayesStrategy(), closed_form_Q(n)) == greedy_bayes_expected_reward(n)


@pytest.mark.parametrize("n", range(1, 11))
def test_per_step_posterior_agreement(n):
    counts = defaultdict(Counter)
    for bits in itertools.product((0, 1), repeat=n):
        perm = word_to_permutation(bits).cards
        for m in range(n):
            counts[perm[:m]][perm[m]] += 1
    s = OptimalStrategy()
    for history, per_card in counts.items():
        assert per_card[s(history, n)] == max(per_card.values())
        assert posterior_table(n)[history][1] == max(per_card.values())


# -- zero-feedback baseline -----------------------------------------------------------------


def test_zero_feedback_small():
    assert zero_feedback_value(1) == 1
    assert zero_feedback_value(2) == Fraction(3, 2)


@pytest.mark.parametrize("n", list(range(1, 25)) + [40, 64])
def test_zero_feedback_matches_column_maxima(n):
    P = transition_matrix(n)
    assert zero_feedback_value(n) == sum(max(col) for col in zip(*P.entries))


@pytest.mark.parametrize("n", [1, 2, 7, 30, 150])
def test_zero_feedback_float_mode(n):
    assert zero_feedback_value_float(n, a_sequence_float(n)) == pytest.approx(float(zero_feedback_value(n)), rel=1e-13)


def test_zero_feedback_n400_near_asymptote():
    # Calibrated remainder at n = 400 is about -0.96; 1.5 leaves headroom.
    assert abs(float(zero_feedback_value(400)) - 2 / 3.141592653589793**0.5 * 20) < 1.5
