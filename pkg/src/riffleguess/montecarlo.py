"""Seeded simulation of riffle shuffles and complete-feedback play.

Every random number is a pure function of ``(master_seed, stream, trial,
lane)``, produced by a keyed SplitMix64-style mixer.  Trial ``t`` therefore
sees the same shuffle no matter how trials are chunked or spread across
worker processes, and histograms (integer counts) aggregate in any order.
"""

from __future__ import annotations

import json
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Literal

import numpy as np
from scipy import stats

from .shuffle import gsr_two_step_batch
from .strategy import GreedyBayesStrategy, _reward

__all__ = [
    "SimulationConfig",
    "SimulationReport",
    "UniformityReport",
    "counter_uniform64",
    "sample_permutations",
    "optimal_rewards",
    "run_trials",
    "interleave_uniformity_test",
    "sampler_equivalence_test",
]

Sampler = Literal["two_step", "binary_word"]
StrategyName = Literal["optimal", "optimal_high", "greedy_bayes"]

_MASK = (1 << 64) - 1
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_LANE_GAMMA = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

_STREAM_WORD = 1
_STREAM_CUT = 2
_STREAM_DROP = 3
_STREAM_PILES = 4

CHUNK = 1 << 16


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _key(seed: int, stream: int) -> np.ndarray:
    s = np.array([seed & _MASK], dtype=np.uint64)
    return _mix(s ^ _mix(np.array([stream], dtype=np.uint64) * _GAMMA))


def counter_uint64(seed: int, stream: int, trials: np.ndarray, lanes: int) -> np.ndarray:
    """Raw 64-bit words, shape ``(len(trials), lanes)``; entry ``[i, j]`` depends only on (seed, stream, trials[i], j)."""
    trials = np.asarray(trials, dtype=np.uint64)
    sub = _mix(_key(seed, stream) + (trials + np.uint64(1)) * _GAMMA)
    lane = (np.arange(lanes, dtype=np.uint64) + np.uint64(1)) * _LANE_GAMMA
    return _mix(sub[:, None] ^ lane[None, :])


def counter_uniform64(seed: int, stream: int, trials: np.ndarray, lanes: int) -> np.ndarray:
    """Uniform doubles in ``[0, 1)`` from the top 53 bits of each counter word."""
    return (counter_uint64(seed, stream, trials, lanes) >> np.uint64(11)) * 2.0**-53


def _bits(seed: int, stream: int, trials: np.ndarray, n: int) -> np.ndarray:
    words = counter_uint64(seed, stream, trials, (n + 63) // 64)
    j = np.arange(n)
    return ((words[:, j // 64] >> (j % 64).astype(np.uint64)) & np.uint64(1)).astype(np.int64)


def _interleave_rows(bits: np.ndarray) -> np.ndarray:
    n = bits.shape[1]
    k = n - bits.sum(axis=1, keepdims=True)
    low = np.cumsum(1 - bits, axis=1)
    high = k + np.cumsum(bits, axis=1)
    return np.where(bits == 1, high, low)


def sample_permutations(n: int, seed: int, trials: np.ndarray, sampler: Sampler = "binary_word") -> np.ndarray:
    """One riffle-shuffled deck per trial index, shape ``(len(trials), n)``."""
    trials = np.asarray(trials, dtype=np.uint64)
    if sampler == "binary_word":
        return _interleave_rows(_bits(seed, _STREAM_WORD, trials, n))
    if sampler == "two_step":
        cuts = _bits(seed, _STREAM_CUT, trials, n).sum(axis=1)
        drops = counter_uniform64(seed, _STREAM_DROP, trials, n)
        return gsr_two_step_batch(n, cuts, drops)
    raise ValueError(f"unknown sampler {sampler!r}")


def optimal_rewards(decks: np.ndarray, tie_break: Literal["low", "high"] = "low") -> np.ndarray:
    """Reward of the optimal strategy on each row of ``decks``, vectorised over rows.

    Rows must hold one-shuffle decks; the state machine is the same as
    :class:`~riffleguess.strategy.OptimalStrategy`.
    """
    rows, n = decks.shape
    consecutive = np.ones(rows, dtype=bool)
    m = np.zeros(rows, dtype=np.int64)
    pivot = np.zeros(rows, dtype=np.int64)
    low_left = np.zeros(rows, dtype=np.int64)
    high_left = np.zeros(rows, dtype=np.int64)
    reward = np.zeros(rows, dtype=np.int64)
    for j in range(n):
        card = decks[:, j]
        hit_next = consecutive & (card == m + 1)
        breaks = consecutive & ~hit_next
        inter = ~consecutive
        if tie_break == "low":
            guess_low = low_left >= high_left
        else:
            guess_low = low_left > high_left
        is_low = card < pivot
        reward += hit_next | (inter & (guess_low == is_low))
        low_left -= inter & is_low
        high_left -= inter & ~is_low
        m += hit_next
        pivot = np.where(breaks, card, pivot)
        low_left = np.where(breaks, card - 1 - m, low_left)
        high_left = np.where(breaks, n - card, high_left)
        consecutive &= ~breaks
    return reward


@dataclass(frozen=True)
class SimulationConfig:
    n: int
    trials: int
    master_seed: int
    sampler: Sampler = "binary_word"
    strategy: StrategyName = "optimal"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.master_seed <= _MASK:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.sampler not in ("two_step", "binary_word"):
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.strategy not in ("optimal", "optimal_high", "greedy_bayes"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


@dataclass(frozen=True)
class SimulationReport:
    config: SimulationConfig
    mean_reward: float
    standard_error: float
    histogram: dict[int, int]
    elapsed: float = field(default=0.0, compare=False)

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "config": asdict(self.config),
            "mean_reward": self.mean_reward,
            "standard_error": self.standard_error,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }
        if timing:
            out["elapsed"] = self.elapsed
        return out

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> SimulationReport:
        return cls(
            SimulationConfig(**data["config"]),
            data["mean_reward"],
            data["standard_error"],
            {int(k): v for k, v in data["histogram"].items()},
            data.get("elapsed", 0.0),
        )

    def histogram_csv(self) -> str:
        lines = ["reward,count"] + [f"{k},{v}" for k, v in sorted(self.histogram.items())]
        return "\n".join(lines) + "\n"


def _chunk_histogram(config: SimulationConfig, start: int, stop: int) -> Counter:
    trials = np.arange(start, stop, dtype=np.uint64)
    decks = sample_permutations(config.n, config.master_seed, trials, config.sampler)
    if config.strategy == "greedy_bayes":
        s = GreedyBayesStrategy()
        rewards = [_reward(s, tuple(int(c) for c in row)) for row in decks]
        return Counter(rewards)
    tie = "high" if config.strategy == "optimal_high" else "low"
    values, counts = np.unique(optimal_rewards(decks, tie), return_counts=True)
    return Counter({int(v): int(c) for v, c in zip(values, counts)})


def run_trials(config: SimulationConfig, workers: int = 1) -> SimulationReport:
    """Simulate ``config.trials`` independent play-throughs.

    The report (apart from ``elapsed``) depends only on ``config``.
    """
    t0 = time.perf_counter()
    spans = [(s, min(s + CHUNK, config.trials)) for s in range(0, config.trials, CHUNK)]
    hist: Counter = Counter()
    if workers > 1 and len(spans) > 1:
        with ProcessPoolExecutor(workers) as pool:
            for part in pool.map(_chunk_histogram, [config] * len(spans), *zip(*spans)):
                hist.update(part)
    else:
        for start, stop in spans:
            hist.update(_chunk_histogram(config, start, stop))
    T = config.trials
    s1 = sum(r * c for r, c in hist.items())
    s2 = sum(r * r * c for r, c in hist.items())
    mean = Fraction(s1, T)
    var = (Fraction(s2) - Fraction(s1 * s1, T)) / (T - 1) if T > 1 else Fraction(0)
    se = math.sqrt(var / T)
    return SimulationReport(
        config, float(mean), se, dict(sorted(hist.items())), time.perf_counter() - t0
    )


@dataclass(frozen=True)
class UniformityReport:
    a: int
    b: int
    trials: int
    seed: int
    categories: int
    statistic: float
    p_value: float
    counts: tuple[int, ...]


def interleave_uniformity_test(a: int, b: int, trials: int, seed: int) -> UniformityReport:
    """Chi-square test of proportional drops against the uniform law on interleavings."""
    if a + b > 12:
        raise ValueError("a + b must be at most 12 so the reference law is enumerable")
    if a < 0 or b < 0 or a + b == 0:
        raise ValueError("need nonnegative pile sizes with at least one card")
    n = a + b
    index = {pos: i for i, pos in enumerate(combinations(range(n), a))}
    t = np.arange(trials, dtype=np.uint64)
    decks = gsr_two_step_batch(
        n, np.full(trials, a), counter_uniform64(seed, _STREAM_PILES, t, n)
    )
    from_a = decks <= a
    weights = 1 << np.arange(n, dtype=np.int64)
    keys = from_a.astype(np.int64) @ weights
    key_of = {sum(1 << p for p in pos): i for pos, i in index.items()}
    counts = np.zeros(len(index), dtype=np.int64)
    u, c = np.unique(keys, return_counts=True)
    for key, cnt in zip(u, c):
        counts[key_of[int(key)]] += cnt
    if len(index) == 1:
        statistic, p_value = 0.0, 1.0
    else:
        res = stats.chisquare(counts)
        statistic, p_value = float(res.statistic), float(res.pvalue)
    return UniformityReport(a, b, trials, seed, len(index), statistic, p_value, tuple(int(x) for x in counts))


def sampler_equivalence_test(n: int, trials: int, seed: int) -> tuple[float, float]:
    """Two-sample chi-square on permutation frequencies of both samplers; returns (statistic, p-value)."""
    t = np.arange(trials, dtype=np.uint64)
    tables = []
    for sampler in ("two_step", "binary_word"):
        rows, counts = np.unique(sample_permutations(n, seed, t, sampler), axis=0, return_counts=True)
        tables.append({tuple(r): int(c) for r, c in zip(rows.tolist(), counts)})
    support = sorted(set(tables[0]) | set(tables[1]))
    observed = np.array([[tab.get(p, 0) for p in support] for tab in tables])
    res = stats.chi2_contingency(observed)
    return float(res.statistic), float(res.pvalue)
