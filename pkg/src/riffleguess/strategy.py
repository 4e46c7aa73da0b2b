"""Guessing strategies for a once-riffled deck under complete feedback.

The optimal rule runs in two phases.  While the revealed cards are
``1, 2, ..., m`` it guesses ``m + 1``.  The first out-of-order card ``k``
splits the unseen cards into two ordered piles, ``m+1..k-1`` and
``k+1..n``, which are known to be uniformly interleaved; from then on it
guesses the head of the longer pile.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Literal, Sequence

import numpy as np

from .shuffle import (
    TABLE_LIMIT,
    Permutation,
    ShuffleDistribution,
    _interleave,
    iter_words,
    rising_sequence_count,
)

__all__ = [
    "ImpossibleDeckError",
    "DeckExhaustedError",
    "GameState",
    "Step",
    "GameTranscript",
    "Strategy",
    "OptimalStrategy",
    "GreedyBayesStrategy",
    "FunctionStrategy",
    "initial_state",
    "algo1_next_guess",
    "advance_state",
    "play_with_feedback",
    "expected_reward",
    "greedy_bayes_posterior",
    "greedy_bayes_guess",
    "greedy_bayes_expected_reward",
    "zero_feedback_value",
    "zero_feedback_value_float",
    "GREEDY_LIMIT",
    "is_one_shuffle",
    "posterior_table",
]

GREEDY_LIMIT = 16

TieBreak = Literal["low", "high"]


class ImpossibleDeckError(ValueError):
    """The revealed card cannot occur after a single riffle shuffle."""


class DeckExhaustedError(ValueError):
    pass


@dataclass(frozen=True)
class GameState:
    """Position in the optimal strategy's state machine.

    ``low`` and ``high`` are the unrevealed parts of the two piles; they are
    only meaningful in the ``"interleave"`` phase.
    """

    n: int
    phase: Literal["consecutive", "interleave"] = "consecutive"
    m: int = 0
    low: range = field(default=range(0))
    high: range = field(default=range(0))

    @property
    def remaining(self) -> int:
        if self.phase == "consecutive":
            return self.n - self.m
        return len(self.low) + len(self.high)


def initial_state(n: int) -> GameState:
    if n < 1:
        raise ValueError("n must be positive")
    return GameState(n)


def algo1_next_guess(state: GameState, tie_break: TieBreak = "low") -> int:
    if state.remaining == 0:
        raise DeckExhaustedError("every card has been revealed")
    if state.phase == "consecutive":
        return state.m + 1
    lo, hi = len(state.low), len(state.high)
    if lo > hi or (lo == hi and tie_break == "low"):
        return state.low[0]
    return state.high[0]


def advance_state(state: GameState, revealed: int) -> GameState:
    n = state.n
    if state.remaining == 0:
        raise DeckExhaustedError("every card has been revealed")
    if state.phase == "consecutive":
        m = state.m
        if not m < revealed <= n:
            raise ImpossibleDeckError(f"card {revealed} was already revealed or is not in 1..{n}")
        if revealed == m + 1:
            return GameState(n, "consecutive", m + 1)
        return GameState(n, "interleave", m, range(m + 1, revealed), range(revealed + 1, n + 1))
    if state.low and revealed == state.low[0]:
        return GameState(n, "interleave", state.m, state.low[1:], state.high)
    if state.high and revealed == state.high[0]:
        return GameState(n, "interleave", state.m, state.low, state.high[1:])
    raise ImpossibleDeckError(
        f"card {revealed} is impossible under one riffle shuffle: pile heads are "
        f"{state.low[0] if state.low else None} and {state.high[0] if state.high else None}"
    )


@dataclass(frozen=True)
class Step:
    guess: int
    revealed: int
    correct: bool


@dataclass(frozen=True)
class GameTranscript:
    permutation: Permutation
    steps: tuple[Step, ...]

    @property
    def reward(self) -> int:
        return sum(s.correct for s in self.steps)

    def as_dict(self) -> dict:
        return {
            "permutation": list(self.permutation.cards),
            "steps": [
                {"guess": s.guess, "revealed": s.revealed, "correct": s.correct} for s in self.steps
            ],
            "reward": self.reward,
        }


class Strategy(ABC):
    """A deterministic map from revealed history to the next guess.

    Subclasses keep an opaque per-game state so a play-through costs
    O(n) rather than replaying the history at every step.
    """

    @abstractmethod
    def start(self, n: int): ...

    @abstractmethod
    def guess(self, state) -> int: ...

    @abstractmethod
    def update(self, state, revealed: int): ...

    def __call__(self, history: Sequence[int], n: int) -> int:
        state = self.start(n)
        for card in history:
            state = self.update(state, card)
        return self.guess(state)


@dataclass(frozen=True)
class OptimalStrategy(Strategy):
    tie_break: TieBreak = "low"

    def start(self, n):
        return initial_state(n)

    def guess(self, state):
        return algo1_next_guess(state, self.tie_break)

    def update(self, state, revealed):
        return advance_state(state, revealed)


@dataclass(frozen=True)
class FunctionStrategy(Strategy):
    """Adapter for a plain ``rule(history, n) -> card`` callable."""

    rule: Callable[[tuple[int, ...], int], int]

    def start(self, n):
        return (n, ())

    def guess(self, state):
        n, history = state
        return self.rule(history, n)

    def update(self, state, revealed):
        n, history = state
        return (n, history + (revealed,))


class GreedyBayesStrategy(Strategy):
    """Posterior-argmax guessing under the one-shuffle law, by enumeration.

    Posterior counts for every reachable history are tabulated once per
    deck size.  Ties go to the smallest card label.
    """

    def start(self, n):
        if n > GREEDY_LIMIT:
            raise ValueError(f"greedy enumeration is capped at n = {GREEDY_LIMIT}")
        return (n, ())

    def guess(self, state):
        n, history = state
        try:
            return posterior_table(n)[history][0]
        except KeyError:
            raise ImpossibleDeckError(f"history {history} is impossible under one riffle shuffle") from None

    def update(self, state, revealed):
        n, history = state
        return (n, history + (revealed,))


@lru_cache(maxsize=4)
def posterior_table(n: int) -> dict[tuple[int, ...], tuple[int, int, int]]:
    """history -> (argmax card, its word count, total word count) for every proper prefix."""
    counts: dict[tuple[int, ...], dict[int, int]] = defaultdict(lambda: defaultdict(int))
    for bits in iter_words(n):
        perm = _interleave(bits)
        for m in range(n):
            counts[perm[:m]][perm[m]] += 1
    best = {}
    for history, per_card in counts.items():
        card = min(per_card, key=lambda c: (-per_card[c], c))
        best[history] = (card, per_card[card], sum(per_card.values()))
    return best


def play_with_feedback(s: Strategy, truth: Permutation | Sequence[int]) -> GameTranscript:
    if not isinstance(truth, Permutation):
        truth = Permutation(tuple(truth))
    state = s.start(truth.n)
    steps = []
    for card in truth.cards:
        g = s.guess(state)
        steps.append(Step(g, card, g == card))
        state = s.update(state, card)
    return GameTranscript(truth, tuple(steps))


def _reward(s: Strategy, cards: tuple[int, ...]) -> int:
    state = s.start(len(cards))
    total = 0
    for card in cards:
        total += s.guess(state) == card
        state = s.update(state, card)
    return total


def expected_reward(s: Strategy, d: ShuffleDistribution) -> Fraction:
    """Exact expected reward of ``s`` against ``d``, summed over the whole support."""
    if d.n > TABLE_LIMIT:
        raise ValueError(
            f"enumeration is capped at n = {TABLE_LIMIT}; use analysis.exact_G_ladder for larger decks"
        )
    items = d.items()
    identity, p_id = next(items)
    rs2_total = sum(_reward(s, perm) for perm, _ in items)
    return p_id * _reward(s, identity) + d.rs2_probability * rs2_total


def greedy_bayes_posterior(history: Sequence[int], n: int) -> dict[int, Fraction]:
    """Posterior of the next card given the revealed history, by enumerating all words."""
    if n > GREEDY_LIMIT:
        raise ValueError(f"greedy enumeration is capped at n = {GREEDY_LIMIT}")
    history = tuple(history)
    m = len(history)
    if m >= n:
        raise DeckExhaustedError("every card has been revealed")
    mass: dict[int, int] = defaultdict(int)
    for bits in iter_words(n):
        perm = _interleave(bits)
        if perm[:m] == history:
            mass[perm[m]] += 1
    total = sum(mass.values())
    if not total:
        raise ImpossibleDeckError(f"history {history} is impossible under one riffle shuffle")
    return {card: Fraction(c, total) for card, c in sorted(mass.items())}


def greedy_bayes_guess(history: Sequence[int], n: int) -> int:
    post = greedy_bayes_posterior(history, n)
    return min(post, key=lambda c: (-post[c], c))


def greedy_bayes_expected_reward(n: int) -> Fraction:
    """Expected reward of posterior-argmax play under the one-shuffle law.

    Computed on the prefix tree of the word multiset: at each node the
    value is the largest next-card mass plus the values of the children.
    Independent of any strategy state machine.
    """
    if n > GREEDY_LIMIT:
        raise ValueError(f"greedy enumeration is capped at n = {GREEDY_LIMIT}")
    perms = [_interleave(bits) for bits in iter_words(n)]

    def node(group: list[tuple[int, ...]], depth: int) -> int:
        if depth == n:
            return 0
        children: dict[int, list] = defaultdict(list)
        for p in group:
            children[p[depth]].append(p)
        return max(len(g) for g in children.values()) + sum(node(g, depth + 1) for g in children.values())

    return Fraction(node(perms, 0), 2**n)


def zero_feedback_value(n: int) -> Fraction:
    """Sum over positions of the largest single-card placement probability.

    Uses the column structure of the placement matrix: above the diagonal a
    column is a binomial row scaled by ``2**-j``, below it a binomial row
    scaled by ``2**-(n-j+1)``, so each off-diagonal maximum is a central
    binomial coefficient.
    """
    if n < 1:
        raise ValueError("n must be positive")
    total = Fraction(0)
    for j in range(1, n + 1):
        best = Fraction(2 ** (j - 1) + 2 ** (n - j), 2**n)
        if j >= 2:
            best = max(best, Fraction(math.comb(j - 1, (j - 1) // 2), 2**j))
        if j < n:
            best = max(best, Fraction(math.comb(n - j, (n - j) // 2), 2 ** (n - j + 1)))
        total += best
    return total


def zero_feedback_value_float(n: int, central: Sequence[float]) -> float:
    """Float version of :func:`zero_feedback_value`.

    ``central[i]`` must hold ``C(i, i//2) / 2**i`` for ``0 <= i < n``.
    """
    j = np.arange(1, n + 1)
    a = np.asarray(central[:n], dtype=float)
    diag = np.ldexp(1.0, j - 1 - n) + np.ldexp(1.0, -j)
    upper = np.where(j >= 2, a[np.maximum(j - 1, 0)] / 2, 0.0)
    lower = np.where(j < n, a[np.minimum(n - j, n - 1)] / 2, 0.0)
    return float(np.maximum(diag, np.maximum(upper, lower)).sum())


def is_one_shuffle(p: Permutation) -> bool:
    return rising_sequence_count(p) <= 2
