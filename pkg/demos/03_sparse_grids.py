"""Hyperbolic-cross tensor spaces: sizes, tails and the dimension rate.

Run: python demos/03_sparse_grids.py
"""

# %%
import math
from fractions import Fraction

from tensorhull import SparseGridSpace, TensorPoint, build_dictionary, choose_K, dimension_rate, tensor_residual

# %%
for K in range(7):
    s = SparseGridSpace(2, 2, K)
    print(f"d=2 q=2 K={K}: dimension {s.dimension:5d}  bound {s.dimension_bound:5d}  full tensor {(2 << K) ** 2}")

# %% [markdown]
# Exact distance of a product of two hinges from the sparse space, next to
# the analytic tail bound.

# %%
D = build_dictionary(2, 8)
p = TensorPoint((Fraction(3, 16), Fraction(77, 256)), 2)
for K in range(1, 9):
    r = tensor_residual(p, D, K)
    print(f"K={K}: residual {r.value:.3e}  bound {r.bound:.3e}")

# %%
gamma, W = 1 / math.sqrt(3), 2 / 3
for eps in (0.1, 0.01, 0.001):
    c = choose_K(eps, gamma, W, d=2, q=2)
    print(f"eps={eps}: K={c.K} dimension={c.dimension} bound={c.dimension_bound}")

r = dimension_rate([2.0**-t for t in range(2, 13)], q=2)
print(f"fitted exponent {r.exponent:.3f} (W = {W:.3f}), fitted log power {r.log_power:.3f}")
