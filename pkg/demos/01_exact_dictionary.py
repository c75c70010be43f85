"""Building the nested piecewise-polynomial dictionary with exact rationals.

Run: python demos/01_exact_dictionary.py
"""

# %%
from fractions import Fraction

from tensorhull import build_dictionary, analyze, truncated_power

# %% [markdown]
# With q = 2 the coarse block is {1, u} and the first detail block comes from
# the hinge generators 1{u >= 1/2} and (u - 1/2)_+. Atoms are stored
# unnormalized, with their squared norms as exact fractions.

# %%
D = build_dictionary(q=2, max_level=3)
for i in range(4):
    f = D.atoms[i]
    print(f"atom {i + 1}: norm2 = {D.norms2[i]}")
    for lo, piece in zip(f.breakpoints, f.pieces):
        print(f"    from u = {lo}: coefficients {[str(c) for c in piece]}")

# %%
# The Gram matrix is diagonal as an identity between rationals, not up to
# rounding.
G = D.gram()
off = sum(1 for i in range(len(D)) for j in range(len(D)) if i != j and G[i][j] != 0)
print("nonzero off-diagonal Gram entries:", off)

# %% [markdown]
# With q = 1 the construction collapses to the Haar system.

# %%
H = build_dictionary(q=1, max_level=2)
for i, (f, n2) in enumerate(zip(H.atoms, H.norms2)):
    print(f"haar atom {i + 1}: pieces {[[str(c) for c in p] for p in f.pieces]} on {[str(b) for b in f.breakpoints]}")

# %%
# Level energies of a hinge: how much of it each resolution level carries.
a = analyze(D, truncated_power(2, Fraction(5, 16)))
for k, e in enumerate(a.level_energies):
    print(f"level {k}: b_k^2 = {e}")
print("residual after level 3:", a.residuals2()[-1])
