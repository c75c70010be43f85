"""How fast truncated powers are approximated by dyadic piecewise polynomials.

Run: python demos/02_approximation_ladder.py
"""

# %%
from fractions import Fraction

import numpy as np

from tensorhull import ApproximationLadder, approximation_number, m_epsilon

# %% [markdown]
# For each family the worst residual over a dense grid of break locations is
# compared with the certificate gamma * 2**(-k/W).

# %%
grid = [Fraction(j, 512) for j in range(513)]
for q in (1, 2, 3):
    ladder = ApproximationLadder(q, 6)
    deltas = []
    for k in range(7):
        r = approximation_number(ladder, k, grid)
        deltas.append(r.delta)
        print(f"q={q} k={k} dim={ladder.dimension(k):4d}  delta={r.delta:.3e}  bound={r.bound:.3e}  worst v={r.argmax}")
    slope = np.polyfit(range(1, 7), np.log2(deltas[1:]), 1)[0]
    print(f"  log2 delta per level: {slope:.3f} (expected {-1 / ladder.W:.3f})\n")

# %%
# Dimension needed for a target accuracy.
for q in (1, 2):
    ladder = ApproximationLadder(q, 20)
    for eps in (0.1, 0.01, 0.001):
        k, dim = m_epsilon(ladder, eps)
        print(f"q={q} eps={eps}: level {k}, dimension {dim}")
