"""Permutations, the GSR riffle shuffle, and exact shuffle distributions.

Decks are described top to bottom by card labels ``1..n``.  A riffle outcome
is encoded canonically as a binary word: the number of 0-bits is the cut
size ``k``, positions holding a 0 receive cards ``1..k`` in order and
positions holding a 1 receive ``k+1..n`` in order.  Uniform words of length
``n`` reproduce the one-shuffle law exactly.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import mpmath
import numpy as np

__all__ = [
    "Permutation",
    "BinaryWord",
    "ShuffleDistribution",
    "TransitionMatrix",
    "TABLE_LIMIT",
    "rising_sequence_count",
    "gsr_sample_two_step",
    "gsr_two_step_batch",
    "word_to_permutation",
    "iter_words",
    "iter_support",
    "word_distribution",
    "closed_form_Q",
    "conditional_Q_g",
    "conditioned_on_first_card",
    "count_rs2",
    "transition_matrix",
    "enumerated_transition_matrix",
    "tv_distance",
    "tv_distance_tables",
    "entropy_Q",
    "enumerated_entropy",
    "drop_process_distribution",
]

# Explicit tables hold 2**n entries; beyond this they are refused.
TABLE_LIMIT = 24


@dataclass(frozen=True)
class Permutation:
    """A deck arrangement; ``cards[j]`` is the card at position ``j`` from the top."""

    cards: tuple[int, ...]

    def __post_init__(self):
        cards = tuple(int(c) for c in self.cards)
        object.__setattr__(self, "cards", cards)
        if not cards:
            raise ValueError("a permutation needs at least one card")
        if sorted(cards) != list(range(1, len(cards) + 1)):
            raise ValueError(f"{cards!r} is not a permutation of 1..{len(cards)}")

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def parse(cls, text: str) -> Permutation:
        """Parse a comma-separated, 1-based, top-to-bottom card list."""
        try:
            cards = tuple(int(tok) for tok in text.split(","))
        except ValueError as exc:
            raise ValueError(f"invalid permutation string {text!r}") from exc
        return cls(cards)

    @property
    def n(self) -> int:
        return len(self.cards)

    def is_identity(self) -> bool:
        return all(c == i for i, c in enumerate(self.cards, 1))

    def __iter__(self):
        return iter(self.cards)

    def __len__(self):
        return len(self.cards)

    def __str__(self):
        return ",".join(map(str, self.cards))


@dataclass(frozen=True)
class BinaryWord:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        object.__setattr__(self, "bits", bits)
        if not bits:
            raise ValueError("a binary word needs at least one symbol")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"{bits!r} contains symbols outside {{0, 1}}")

    @classmethod
    def parse(cls, text: str) -> BinaryWord:
        return cls(tuple(int(ch) for ch in text))

    @property
    def n(self) -> int:
        return len(self.bits)


def rising_sequence_count(p: Permutation | Sequence[int]) -> int:
    """Number of maximal runs of consecutive values appearing left to right.

    A new rising sequence starts at value ``v + 1`` exactly when it sits
    above ``v`` in the deck.

    >>> rising_sequence_count([1, 4, 2, 5, 3, 6])
    2
    """
    cards = p.cards if isinstance(p, Permutation) else tuple(p)
    position = [0] * (len(cards) + 1)
    for j, c in enumerate(cards):
        position[c] = j
    return 1 + sum(position[v + 1] < position[v] for v in range(1, len(cards)))


def word_to_permutation(w: BinaryWord | Sequence[int]) -> Permutation:
    bits = w.bits if isinstance(w, BinaryWord) else tuple(w)
    return Permutation(_interleave(bits))


def _interleave(bits: Sequence[int]) -> tuple[int, ...]:
    k = len(bits) - sum(bits)
    low, high = 1, k + 1
    out = []
    for b in bits:
        if b:
            out.append(high)
            high += 1
        else:
            out.append(low)
            low += 1
    return tuple(out)


def iter_words(n: int) -> Iterator[tuple[int, ...]]:
    """All ``2**n`` binary words of length ``n`` as bit tuples."""
    return itertools.product((0, 1), repeat=n)


def iter_support(n: int) -> Iterator[tuple[int, ...]]:
    """Each permutation with at most two rising sequences, exactly once.

    The identity comes first; the remaining words are those that are not
    of the sorted form ``0..01..1``.
    """
    yield tuple(range(1, n + 1))
    for bits in iter_words(n):
        if any(a > b for a, b in zip(bits, bits[1:])):
            yield _interleave(bits)


def word_distribution(n: int) -> dict[tuple[int, ...], Fraction]:
    """Exact law obtained by pushing all ``2**n`` words through the interleaving map."""
    if n > TABLE_LIMIT:
        raise ValueError(f"explicit tables are refused for n > {TABLE_LIMIT}")
    counts = Counter(_interleave(bits) for bits in iter_words(n))
    total = 2**n
    return {perm: Fraction(c, total) for perm, c in counts.items()}


def gsr_sample_two_step(n: int, rng: np.random.Generator) -> Permutation:
    """One draw from the operational GSR process.

    The deck is cut binomially, then cards fall from the pile bottoms with
    probability proportional to pile size.  The shuffled pile is built
    bottom up.
    """
    if n < 1:
        raise ValueError("n must be positive")
    k = int(rng.binomial(n, 0.5))
    x, y = k, n - k
    next_a, next_b = k, n
    deck = [0] * n
    for pos in range(n - 1, -1, -1):
        if rng.random() * (x + y) < x:
            deck[pos] = next_a
            next_a -= 1
            x -= 1
        else:
            deck[pos] = next_b
            next_b -= 1
            y -= 1
    return Permutation(tuple(deck))


def gsr_two_step_batch(n: int, cut_sizes: np.ndarray, drops: np.ndarray) -> np.ndarray:
    """Vectorised two-step GSR shuffle driven by supplied randomness.

    ``cut_sizes`` holds one binomial cut per row and ``drops`` holds ``n``
    uniforms in ``[0, 1)`` per row, consumed bottom-up.  Returns an integer
    array of shape ``(rows, n)``, one deck per row.
    """
    cut_sizes = np.asarray(cut_sizes, dtype=np.int64)
    rows = cut_sizes.shape[0]
    x = cut_sizes.copy()
    y = n - cut_sizes
    next_a = cut_sizes.copy()
    next_b = np.full(rows, n, dtype=np.int64)
    decks = np.empty((rows, n), dtype=np.int64)
    for s in range(n):
        from_a = drops[:, s] * (x + y) < x
        decks[:, n - 1 - s] = np.where(from_a, next_a, next_b)
        next_a -= from_a
        x -= from_a
        next_b -= ~from_a
        y -= ~from_a
    return decks


def count_rs2(n: int) -> int:
    """Number of permutations of ``n`` cards with exactly two rising sequences."""
    if n < 1:
        raise ValueError("n must be positive")
    return 2**n - n - 1


@dataclass(frozen=True)
class ShuffleDistribution:
    """A law on S_n supported on permutations with at most two rising sequences.

    Held parametrically: one probability for the identity and one shared by
    every permutation with two rising sequences.  ``to_table`` materialises
    the explicit form on demand.
    """

    n: int
    id_probability: Fraction
    rs2_probability: Fraction

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        for p in (self.id_probability, self.rs2_probability):
            if not isinstance(p, (int, Fraction)):
                raise TypeError("probabilities must be exact rationals")
            if not 0 <= p <= 1:
                raise ValueError(f"probability {p} outside [0, 1]")
        if self.id_probability + count_rs2(self.n) * self.rs2_probability != 1:
            raise ValueError("probabilities do not sum to 1")

    def probability(self, p: Permutation | Sequence[int]) -> Fraction:
        cards = p.cards if isinstance(p, Permutation) else tuple(p)
        rs = rising_sequence_count(cards)
        if rs == 1:
            return Fraction(self.id_probability)
        if rs == 2:
            return Fraction(self.rs2_probability)
        return Fraction(0)

    def items(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        """Support permutations with their probabilities, identity first."""
        it = iter_support(self.n)
        yield next(it), Fraction(self.id_probability)
        for perm in it:
            yield perm, Fraction(self.rs2_probability)

    def to_table(self) -> dict[tuple[int, ...], Fraction]:
        if self.n > TABLE_LIMIT:
            raise ValueError(f"explicit tables are refused for n > {TABLE_LIMIT}")
        return dict(self.items())


def closed_form_Q(n: int) -> ShuffleDistribution:
    """Law of one GSR riffle shuffle of ``n`` cards."""
    return ShuffleDistribution(n, Fraction(n + 1, 2**n), Fraction(1, 2**n))


def conditional_Q_g(n: int) -> ShuffleDistribution:
    """Law of the last ``n`` cards of an ``(n+1)``-card shuffle whose top card is 1, relabelled down by one."""
    return ShuffleDistribution(n, Fraction(n + 2, 2**n + 1), Fraction(1, 2**n + 1))


def conditioned_on_first_card(
    table: Mapping[tuple[int, ...], Fraction], card: int
) -> dict[tuple[int, ...], Fraction]:
    """Condition an explicit law on the top card and relabel the rest to ``1..n-1``."""
    kept = {perm[1:]: p for perm, p in table.items() if perm[0] == card and p}
    mass = sum(kept.values())
    if not mass:
        raise ValueError(f"card {card} never appears on top")
    relabel = lambda c: c - 1 if c > card else c  # noqa: E731
    return {tuple(map(relabel, perm)): p / mass for perm, p in kept.items()}


@dataclass(frozen=True)
class TransitionMatrix:
    """Entry ``(i, j)`` is the probability that card ``i`` ends at position ``j`` (both 1-based)."""

    n: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i - 1][j - 1]

    def row_sums(self) -> list[Fraction]:
        return [sum(row) for row in self.entries]

    def column_sums(self) -> list[Fraction]:
        return [sum(col) for col in zip(*self.entries)]

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries])


def _transition_entry(n: int, i: int, j: int) -> Fraction:
    if i < j:
        return Fraction(math.comb(j - 1, j - i), 2**j)
    if i == j:
        return Fraction(2 ** (j - 1) + 2 ** (n - j), 2**n)
    return Fraction(math.comb(n - j, i - j), 2 ** (n - j + 1))


def transition_matrix(n: int) -> TransitionMatrix:
    if n < 1:
        raise ValueError("n must be positive")
    return TransitionMatrix(
        n,
        tuple(
            tuple(_transition_entry(n, i, j) for j in range(1, n + 1))
            for i in range(1, n + 1)
        ),
    )


def enumerated_transition_matrix(n: int) -> TransitionMatrix:
    """Placement probabilities accumulated over all ``2**n`` words, weight ``2**-n`` each."""
    counts = [[0] * n for _ in range(n)]
    for bits in iter_words(n):
        for j, card in enumerate(_interleave(bits)):
            counts[card - 1][j] += 1
    total = 2**n
    return TransitionMatrix(n, tuple(tuple(Fraction(c, total) for c in row) for row in counts))


def tv_distance(d1: ShuffleDistribution, d2: ShuffleDistribution) -> Fraction:
    """Total variation distance from the parametric forms, without touching S_n."""
    if d1.n != d2.n:
        raise ValueError(f"dimension mismatch: {d1.n} vs {d2.n}")
    half = Fraction(1, 2)
    return half * abs(d1.id_probability - d2.id_probability) + half * count_rs2(d1.n) * abs(
        d1.rs2_probability - d2.rs2_probability
    )


def tv_distance_tables(
    t1: Mapping[tuple[int, ...], Fraction], t2: Mapping[tuple[int, ...], Fraction]
) -> Fraction:
    """Half the L1 distance between two explicit laws."""
    keys = set(t1) | set(t2)
    return sum((abs(t1.get(k, 0) - t2.get(k, 0)) for k in keys), Fraction(0)) / 2


def entropy_Q(n: int, dps: int = 50) -> mpmath.mpf:
    """Entropy in nats of one riffle shuffle of ``n`` cards."""
    with mpmath.workdps(dps):
        return n * mpmath.log(2) - mpmath.mpf(n + 1) / mpmath.mpf(2) ** n * mpmath.log(n + 1)


def enumerated_entropy(table: Mapping[tuple[int, ...], Fraction], dps: int = 50) -> mpmath.mpf:
    with mpmath.workdps(dps):
        return -mpmath.fsum(
            mpmath.mpf(p.numerator) / p.denominator * mpmath.log(mpmath.mpf(p.numerator) / p.denominator)
            for p in table.values()
            if p
        )


def drop_process_distribution(a: int, b: int) -> dict[tuple[int, ...], Fraction]:
    """Exact law of the pile-label sequence (top to bottom) produced by proportional drops.

    Walks the full drop tree: with ``x`` and ``y`` cards left, pile A drops
    next with probability ``x / (x + y)``.  Labels are 0 for pile A and 1 for
    pile B.
    """
    out: dict[tuple[int, ...], Fraction] = {}

    def walk(x: int, y: int, dropped: tuple[int, ...], p: Fraction):
        if x == 0 and y == 0:
            out[dropped[::-1]] = p
            return
        if x:
            walk(x - 1, y, dropped + (0,), p * Fraction(x, x + y))
        if y:
            walk(x, y - 1, dropped + (1,), p * Fraction(y, x + y))

    walk(a, b, (), Fraction(1))
    return out
