# %% [markdown]
# # What one riffle shuffle does to a deck
#
# A single GSR shuffle cuts the deck binomially and drops cards with
# probability proportional to pile size.  Equivalently, label each card with
# a fair bit and stable-sort by label.  Either way the identity keeps a
# lot of mass and every other reachable deck has two rising sequences.

# %%
import itertools

import numpy as np

from riffleguess.shuffle import (
    closed_form_Q,
    conditional_Q_g,
    count_rs2,
    entropy_Q,
    transition_matrix,
    tv_distance,
    word_distribution,
    word_to_permutation,
)

# %%
for bits in itertools.product((0, 1), repeat=3):
    print("".join(map(str, bits)), "->", word_to_permutation(bits))

# %% [markdown]
# Four of the eight words leave the deck alone, so the identity has
# probability 4/8 and the remaining four decks get 1/8 each.

# %%
law = word_distribution(3)
assert law == closed_form_Q(3).to_table()
for n in (3, 8, 20, 52):
    Q = closed_form_Q(n)
    print(f"n={n:2d}  P(identity)={float(Q.id_probability):.3e}  reachable non-identity decks={count_rs2(n)}")

# %% [markdown]
# Where does card 1 end up?  The placement matrix gives the chance that
# the card at position i lands at position j.  Card 1 stays on top a bit
# more than half the time.

# %%
P = transition_matrix(8).to_numpy()
np.set_printoptions(precision=3, suppress=True)
print(P)

# %% [markdown]
# Conditioning on the top card staying put gives a slightly different law
# on the remaining n cards.  The two are very close in total variation,
# which is what lets the exact reward recursion treat them as nearly the same.

# %%
for n in (2, 5, 10, 20):
    print(n, tv_distance(closed_form_Q(n), conditional_Q_g(n)), f"{float(tv_distance(closed_form_Q(n), conditional_Q_g(n))):.2e}")

# %%
for n in (2, 10, 52):
    print(f"entropy of one shuffle, n={n}: {float(entropy_Q(n)):.6f} nats")
