"""Exact recursions and asymptotics for the optimal expected reward.

Two numeric modes run side by side.  ``"rational"`` works with
:class:`fractions.Fraction` throughout.  ``"float"`` never forms ``2**n``
sized quantities: it carries ``F(n) = S(n) / 2**(n+1)`` through an additive
recursion and scales every ladder ratio by ``2**-m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Literal

import numpy as np

from .shuffle import closed_form_Q, count_rs2, iter_support, word_distribution
from .strategy import OptimalStrategy, _reward

__all__ = [
    "Mode",
    "RATIONAL_LADDER_LIMIT",
    "InterleaveRewardTable",
    "interleave_table",
    "f_dp",
    "f_bruteforce",
    "s_sequence",
    "s_definitional",
    "a_sequence",
    "a_sequence_float",
    "A_partial_sum",
    "SeriesValues",
    "series_values",
    "big_F",
    "F_float_table",
    "LadderState",
    "ladder",
    "exact_G_ladder",
    "g_shuffle_reward",
    "G_float_table",
    "approx_G_recursion",
    "approx_G_table",
    "asymptotic_target",
    "consecutive_stage_probability",
    "enumerated_consecutive_probability",
    "second_moment_enumeration",
    "f_prime_series",
    "asymptotics_rows",
    "envelope_deviations",
]

Mode = Literal["rational", "float"]

RATIONAL_LADDER_LIMIT = 200

_SQRT_2_OVER_PI = math.sqrt(2 / math.pi)


def _check_mode(mode: str):
    if mode not in ("rational", "float"):
        raise ValueError(f"unknown mode {mode!r}; expected 'rational' or 'float'")


# ---------------------------------------------------------------------------
# Two uniformly interleaved piles


@dataclass(frozen=True)
class InterleaveRewardTable:
    """Best expected reward ``f(a, b)`` for two uniformly interleaved piles, ``a + b <= max_size``.

    ``values[a][b]`` is stored for the full triangle.
    """

    max_size: int
    values: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def build(cls, max_size: int) -> InterleaveRewardTable:
        rows = [[Fraction(0)] * (max_size + 1 - a) for a in range(max_size + 1)]
        for a in range(max_size + 1):
            rows[a][0] = rows[0][a] = Fraction(a)
        for size in range(2, max_size + 1):
            for a in range(1, size):
                b = size - a
                rows[a][b] = (
                    Fraction(max(a, b), size)
                    + Fraction(b, size) * rows[a][b - 1]
                    + Fraction(a, size) * rows[a - 1][b]
                )
        return cls(max_size, tuple(tuple(r) for r in rows))

    def __call__(self, a: int, b: int) -> Fraction:
        if a < 0 or b < 0 or a + b > self.max_size:
            raise IndexError(f"f({a}, {b}) is outside a table of size {self.max_size}")
        return self.values[a][b]


@lru_cache(maxsize=8)
def interleave_table(max_size: int) -> InterleaveRewardTable:
    return InterleaveRewardTable.build(max_size)


def f_dp(a: int, b: int) -> Fraction:
    if a < 0 or b < 0:
        raise ValueError("pile sizes must be nonnegative")
    # Round up so nearby queries share one cached table.
    size = max(16, 1 << (a + b - 1).bit_length())
    return interleave_table(size)(a, b)


def f_bruteforce(a: int, b: int, tie_break: Literal["low", "high"] = "low") -> Fraction:
    """Average pile-majority reward over every interleaving, each weighted ``1 / C(a+b, a)``."""
    if a < 0 or b < 0:
        raise ValueError("pile sizes must be nonnegative")
    size = a + b
    total = 0
    count = 0
    for low_positions in combinations(range(size), a):
        from_low = [False] * size
        for p in low_positions:
            from_low[p] = True
        x, y = a, b
        for is_low in from_low:
            guess_low = x > y or (x == y and tie_break == "low")
            total += guess_low == is_low
            if is_low:
                x -= 1
            else:
                y -= 1
        count += 1
    return Fraction(total, count)


# ---------------------------------------------------------------------------
# Series S, F, a_i, A_n


@lru_cache(maxsize=None)
def _s_values(n: int) -> tuple[int, ...]:
    s = [0]
    for m in range(1, n + 1):
        s.append(2 ** (m - 1) + math.comb(m - 1, (m - 1) // 2) + m - 2 + 2 * s[-1])
    return tuple(s)


def s_sequence(n: int) -> Fraction:
    """``S(n) = sum_k C(n, k) f(k, n-k)`` via its first-order recursion, ``S(0) = 0``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return Fraction(_s_values(n)[n])


def s_definitional(n: int) -> Fraction:
    table = interleave_table(max(n, 1))
    return sum((math.comb(n, k) * table(k, n - k) for k in range(1, n + 1)), Fraction(0))


def a_sequence(i: int) -> Fraction:
    """``C(i, i//2) / 2**i`` by the multiplicative recurrence."""
    if i < 0:
        raise ValueError("i must be nonnegative")
    a = Fraction(1)
    for j in range(1, i + 1):
        if j % 2:
            a *= Fraction(j, j + 1)
    return a


def a_sequence_float(n: int) -> np.ndarray:
    """``a_0 .. a_n`` in float; odd steps multiply by ``i / (i + 1)``, even steps repeat."""
    factors = np.ones(n + 1)
    odd = np.arange(1, n + 1, 2)
    factors[odd] = odd / (odd + 1)
    return np.cumprod(factors)


def A_partial_sum(n: int, mode: Mode = "rational"):
    _check_mode(mode)
    if mode == "float":
        return float(a_sequence_float(n).sum())
    total, a = Fraction(0), Fraction(1)
    for i in range(n + 1):
        if i and i % 2:
            a *= Fraction(i, i + 1)
        total += a
    return total


def big_F(n: int, mode: Mode = "rational"):
    """``F(n) = S(n) / 2**(n+1)``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    _check_mode(mode)
    if mode == "rational":
        return s_sequence(n) / 2 ** (n + 1)
    return float(F_float_table(n)[n])


@lru_cache(maxsize=8)
def _F_float_cached(n: int) -> np.ndarray:
    a = a_sequence_float(max(n, 1))
    F = np.zeros(n + 1)
    for m in range(1, n + 1):
        F[m] = F[m - 1] + 0.25 + math.ldexp(m - 2, -(m + 1)) + a[m - 1] / 4
    F.flags.writeable = False
    return F


def F_float_table(n: int) -> np.ndarray:
    """``F(0..n)`` by the additive recursion ``F(m) = F(m-1) + 1/4 + (m-2)/2**(m+1) + a_(m-1)/4``."""
    return _F_float_cached(n)


@dataclass(frozen=True)
class SeriesValues:
    n: int
    S: Fraction
    F: Fraction
    a: tuple[Fraction, ...]
    A: Fraction


def series_values(n: int) -> SeriesValues:
    a = [Fraction(1)]
    for i in range(1, n + 1):
        a.append(a[-1] * Fraction(i, i + 1) if i % 2 else a[-1])
    return SeriesValues(n, s_sequence(n), big_F(n), tuple(a), sum(a, Fraction(0)))


# ---------------------------------------------------------------------------
# The conditioning ladder


@dataclass(frozen=True)
class LadderState:
    """Values ``E(m, w)`` for ``m = 1..target_n`` of the weighted family.

    The family on ``m`` cards gives the identity weight ``w`` and every
    permutation with two rising sequences weight 1.  Seeing card 1 on top
    leaves the same family on ``m - 1`` cards; seeing ``k >= 2`` leaves a
    uniform interleaving of ``k - 1`` and ``m - k`` cards.
    """

    target_n: int
    w: int
    E: tuple
    mode: Mode

    @property
    def value(self):
        return self.E[-1]


def ladder(target_n: int, w: int | None = None, mode: Mode = "rational") -> LadderState:
    if target_n < 1:
        raise ValueError("n must be positive")
    _check_mode(mode)
    w = target_n + 1 if w is None else w
    if w < 1:
        raise ValueError("identity weight must be positive")
    if mode == "rational":
        if target_n > RATIONAL_LADDER_LIMIT:
            raise ValueError(
                f"rational ladder is capped at n = {RATIONAL_LADDER_LIMIT}; use mode='float'"
            )
        S = _s_values(target_n)
        E = [Fraction(1)]
        for m in range(2, target_n + 1):
            E.append(
                ((w + count_rs2(m - 1)) * (1 + E[-1]) + S[m - 1]) / Fraction(count_rs2(m) + w)
            )
        return LadderState(target_n, w, tuple(E), mode)
    F = F_float_table(target_n)
    E = [1.0]
    c = w - 1  # w = c + 1 makes w + R_(m-1) = 2**(m-1) + c - m + 1 and R_m + w = 2**m + c - m
    for m in range(2, target_n + 1):
        p = math.ldexp(1.0, -m)
        denom = 1 + (c - m) * p
        E.append((0.5 + (c - m + 1) * p) / denom * (1 + E[-1]) + F[m - 1] / denom)
    return LadderState(target_n, w, tuple(E), mode)


def exact_G_ladder(n: int, mode: Mode = "rational"):
    """Optimal expected reward for a deck of ``n`` cards riffled once."""
    return ladder(n, n + 1, mode).value


def g_shuffle_reward(n: int, mode: Mode = "rational"):
    """Optimal expected reward against the conditional law ``g_n`` (identity weight ``n + 2``)."""
    return ladder(n, n + 2, mode).value


def G_float_table(max_n: int) -> np.ndarray:
    """``G(0..max_n)`` in float, every target's ladder advanced together (``G(0) = 0``)."""
    F = F_float_table(max_n)
    targets = np.arange(1, max_n + 1, dtype=float)
    E = np.ones(max_n)
    G = np.zeros(max_n + 1)
    G[1] = 1.0
    for m in range(2, max_n + 1):
        c = targets[m - 1 :]
        p = math.ldexp(1.0, -m)
        denom = 1 + (c - m) * p
        E[m - 1 :] = (0.5 + (c - m + 1) * p) / denom * (1 + E[m - 1 :]) + F[m - 1] / denom
        G[m] = E[m - 1]
    return G


def approx_G_table(max_n: int) -> np.ndarray:
    """The recursion ``G(n) = G(n-1)/2 + F(n-1) + 1/2`` with the vanishing term dropped, ``G(1) = 1``."""
    F = F_float_table(max_n)
    G = np.zeros(max_n + 1)
    G[1] = 1.0
    for n in range(2, max_n + 1):
        G[n] = 0.5 * G[n - 1] + F[n - 1] + 0.5
    return G


def approx_G_recursion(n: int) -> float:
    if n < 1:
        raise ValueError("n must be positive")
    return float(approx_G_table(n)[n])


def asymptotic_target(n) -> float:
    return n / 2 + _SQRT_2_OVER_PI * np.sqrt(n)


# ---------------------------------------------------------------------------
# Consecutive stage and second moments


def consecutive_stage_probability(n: int, m: int) -> Fraction:
    """P(card m is at position m | positions 1..m-1 hold 1..m-1)."""
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    return Fraction(2 ** (n - m) + m, 2 ** (n - m + 1) + m - 1)


def enumerated_consecutive_probability(n: int, m: int) -> Fraction:
    law = word_distribution(n)
    prefix = tuple(range(1, m))
    given = sum(p for perm, p in law.items() if perm[: m - 1] == prefix)
    hit = sum(p for perm, p in law.items() if perm[:m] == prefix + (m,))
    return hit / given


def second_moment_enumeration(n: int, tie_break: Literal["low", "high"] = "low") -> tuple[Fraction, Fraction]:
    """``(E[R^2], Var R)`` for optimal play, by enumerating the support."""
    if n > 20:
        raise ValueError("second-moment enumeration is capped at n = 20")
    Q = closed_form_Q(n)
    s = OptimalStrategy(tie_break)
    first = second = Fraction(0)
    for idx, perm in enumerate(iter_support(n)):
        r = _reward(s, perm)
        p = Q.rs2_probability if idx else Q.id_probability
        first += p * r
        second += p * r * r
    return second, second - first * first


def f_prime_series(n: int) -> Fraction:
    """``sum_{k=2..n} C(n-1, k-1) f(k-1, n-k)**2``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    table = interleave_table(n - 1)
    return sum((math.comb(n - 1, k - 1) * table(k - 1, n - k) ** 2 for k in range(2, n + 1)), Fraction(0))


# ---------------------------------------------------------------------------
# Tables for reporting and calibration


def asymptotics_rows(max_n: int) -> list[tuple[int, float, float, float, float]]:
    """Rows ``(n, G_exact, G_approx, target, error)`` for ``n = 1..max_n``; error is ``G_exact - target``."""
    G = G_float_table(max_n)
    Gt = approx_G_table(max_n)
    rows = []
    for n in range(1, max_n + 1):
        t = float(asymptotic_target(n))
        rows.append((n, float(G[n]), float(Gt[n]), t, float(G[n]) - t))
    return rows


def envelope_deviations(max_n: int) -> dict[str, np.ndarray]:
    """Deviation of each series from its leading asymptotic, for ``n = 1..max_n``.

    Keys: ``"A"`` for ``A_n - sqrt(8/pi) sqrt(n)``, ``"F"`` for
    ``F(n) - n/4 - sqrt(n/(2 pi))``, ``"zero_feedback"`` for the column-max
    value minus ``(2/sqrt(pi)) sqrt(n)``.
    """
    from .strategy import zero_feedback_value_float

    n = np.arange(1, max_n + 1)
    a = a_sequence_float(max_n)
    A = np.cumsum(a)[1:]
    F = F_float_table(max_n)[1:]
    zf = np.array([zero_feedback_value_float(k, a) for k in n])
    return {
        "A": A - math.sqrt(8 / math.pi) * np.sqrt(n),
        "F": F - n / 4 - np.sqrt(n / (2 * math.pi)),
        "zero_feedback": zf - 2 / math.sqrt(math.pi) * np.sqrt(n),
    }
