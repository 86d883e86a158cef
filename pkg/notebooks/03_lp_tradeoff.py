# %% [markdown]
# # lp certificates and the trade-off between norms
#
# With GN(0, sigma, p) noise the KL budget
# `B = -log(2 sqrt(p1 p2) + 1 - p1 - p2)` must cover a polynomial in several
# norms of the shift.  Certifying every norm with the same radius gives the
# equal-eps point.  Spending the budget unevenly traces a frontier between
# `l_p` and its companion norm.

# %%
import numpy as np

from smoothcert import lp
from smoothcert.divergences import TopTwoProbs

tt = TopTwoProbs(0.99, 0.01)
print("budget", lp.budget(tt))

# %% [markdown]
# ## l3 against l1 on a CIFAR-sized input (d = 3072)

# %%
front = lp.tradeoff_frontier(3, tt, 1.0, 3072, n_points=8)
for pt in front:
    print(f"l3 {pt.eps_high:.4f}   l1 {pt.eps_low:.4f}")

# %% [markdown]
# The left end is where the dimension cap `||delta||_1 <= d^(2/3) ||delta||_3`
# stops binding; it coincides with the radius obtained by inflating every
# lower norm by its dimension factor.

# %%
print(front[0].eps_high, lp.radius_lp_naive(3, tt, 1.0, 3072))

# %% [markdown]
# ## Larger p, smaller radius
#
# At a fixed budget every extra polynomial term eats into the radius, and the
# equal-eps radius shrinks steadily with p.

# %%
rep = lp.vanishing_diagnostic(range(2, 21, 2), tt, 1.0)
for p, r in rep.points:
    print(p, round(r, 4))
print("strictly decreasing:", rep.strictly_decreasing)

# %% [markdown]
# Meanwhile an l_p ball only fills most of the l_inf ball once p is a
# multiple of the dimension:

# %%
d = 3 * 224 * 224
for mult in (1, 3, 9, 27):
    print(f"p = {mult}d  ratio {lp.linf_volume_ratio(mult * d, d):.4f}")
