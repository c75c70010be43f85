"""Desk-scale entropy exponents for hulls of discrete truncated-power designs.

Run: python demos/05_entropy_exponents.py   (about 15 s)
"""

# %%
from tensorhull.hull import ScalingConfig, scaling_experiment

# %% [markdown]
# For each epsilon the experiment measures the smallest ladder level that
# approximates every column to accuracy u(eps) and the greedy count of the
# projected columns, and turns them into an entropy bound. The slope of its
# logarithm against log(1/eps) estimates 2W/(2+W).

# %%
for q, d, m in [(1, 1, 256), (2, 1, 256), (1, 2, 32)]:
    r = scaling_experiment(ScalingConfig(q=q, d=d, m=m, samples=1000))
    print(f"q={q} d={d} m={m}: slope {r.slope:.3f} (target {r.target:.3f}), "
          f"log-corrected {r.log_corrected_slope:.3f}, log trend {r.log_residual_trend:.3f}")
    print(f"  raw sample count slope {r.sample_slope:.3f} (tracks point counts, not entropy)")
    for row in r.rows:
        flag = "*" if row["window"] else " "
        print(f"  {flag} eps={row['epsilon']:.4g} level={row['level']} M={row['M']} s={row['s']} "
              f"N={row['N']} H={row['H_bound']:.1f}")
