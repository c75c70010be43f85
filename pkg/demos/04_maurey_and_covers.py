"""Sparse approximation of hull points and an explicit two-scale cover.

Run: python demos/04_maurey_and_covers.py
"""

# %%
import numpy as np

from tensorhull.hull import (
    DiscreteLadder,
    choose_u,
    discrete_design,
    discrete_tv,
    maurey_mse,
    sample_hull_betas,
    sample_local_betas,
    two_scale_cover,
)

# %% [markdown]
# Discrete hinge design on [1:m]; with the "aligned" columns a unit
# coefficient vector has discrete total variation exactly one.

# %%
X = discrete_design(16, 2, variant="aligned", exact=True)
print("TV of a column:", discrete_tv(X.values[:, 4]))
X = discrete_design(16, 2, exact=True)
print("TV of a shifted column:", discrete_tv(X.values[:, 4]))

# %%
rng = np.random.default_rng(0)
C = rng.standard_normal((16, 32))
C /= np.linalg.norm(C, axis=0)
beta = np.full(32, 1 / 32)
for s in (2, 8, 32, 128):
    mse, se = maurey_mse(C, beta, s, 5000, seed=0)
    print(f"s={s:4d}: mean squared error {mse:.4f} +- {se:.4f}   (bound {1 / s:.4f})")

# %% [markdown]
# Two-scale cover: grid the low-dimensional part, Maurey-sample the rest.

# %%
m, eps = 64, 1 / 16
X = discrete_design(m, 1)
u = max(choose_u(eps, 2.0), eps)
K, V, delta = DiscreteLadder(m, 1).smallest_level(X.columns, u)
b0 = sample_hull_betas(X.p, 1, seed=0, include_vertices=False)[0]
cover = two_scale_cover(X, V, eps, u, X.columns @ b0)
print(f"u={u:.3f} level={K} dim W={cover.r} s={cover.s} N={cover.N}")
print(f"log centers {cover.log_count:.1f} <= budget {cover.budget:.1f}")


def step(b):
    return 16 * eps / max(np.linalg.norm(X.columns @ (b - b0)), 1e-300)


pts = sample_local_betas(b0, X.p, 300, step, seed=0)
worst = max(cover.center(b, task=i)[1] for i, b in enumerate(pts))
print(f"worst distance to center: {worst / eps:.2f} eps (guarantee 4 eps)")
