# %% [markdown]
# # Guessing cards after one shuffle
#
# The dealer shows the cards one at a time; before each one we name a card
# and then see the truth.  Against a once-shuffled deck the best play is
# simple: keep guessing the next card of the untouched top run, and once
# that run breaks, guess the head of whichever of the two piles has more
# cards left.

# %%
from riffleguess.shuffle import Permutation, closed_form_Q
from riffleguess.strategy import (
    GreedyBayesStrategy,
    OptimalStrategy,
    expected_reward,
    play_with_feedback,
    zero_feedback_value,
)

# %%
deck = Permutation.parse("1,2,6,3,7,4,8,5")
t = play_with_feedback(OptimalStrategy(), deck)
for s in t.steps:
    print(f"guess {s.guess}  saw {s.revealed}  {'hit' if s.correct else ''}")
print("reward", t.reward)

# %% [markdown]
# Averaging over every deck the shuffle can produce gives the exact
# expected score.  A brute-force Bayesian player that always names the
# most likely next card scores the same.

# %%
for n in range(1, 9):
    opt = expected_reward(OptimalStrategy(), closed_form_Q(n))
    bayes = expected_reward(GreedyBayesStrategy(), closed_form_Q(n))
    print(n, opt, bayes, float(opt))

# %% [markdown]
# Without feedback the best one can do is pick, for each position, the card
# most likely to sit there.  Feedback is worth a lot: about n/2 extra hits.

# %%
for n in (4, 16, 52):
    print(n, f"no feedback {float(zero_feedback_value(n)):.3f}")
