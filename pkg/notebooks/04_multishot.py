# %% [markdown]
# # Many shots
#
# Repeat the single-shot optimal measurement and process all outcomes
# together: the estimate is `f^{-1}` of the posterior mean of `f`.

# %%
import math

import numpy as np

from symmetro import BlochDirection, blend_family, credible_interval, haldane_prior, make_fmap, run_protocol

fam = blend_family(BlochDirection(0.0, math.pi / 2))
prior = haldane_prior(0.01)
f = make_fmap("weight")

res = run_protocol(fam, prior, f, mu=500, theta_true=0.3, seed=42)
print(res.estimate, credible_interval(res.posterior))
print(res.error_trace[[0, 9, 99, 499]])

# %% [markdown]
# Posterior variance of `f` shrinks with every batch of shots. The product
# `mu * variance` keeps falling over the first hundred shots because the
# fixed measurement was tuned for the broad prior, not for `eta = 0.3`.

# %%
traces = np.array([run_protocol(fam, prior, f, mu=100, theta_true=0.3, seed=s).error_trace for s in range(40)])
med = np.median(traces, axis=0)
for mu in (1, 10, 50, 100):
    print(mu, med[mu - 1], med[mu - 1] * mu)

# %% [markdown]
# The adaptive policy re-optimises before every shot. Under the symmetric
# prior it picks the candidate with the larger `sin^2(beta/2)`.

# %%
res = run_protocol(fam, prior, f, policy="adaptive", mu=20, theta_true=0.3, seed=1,
                   candidates=[{"beta": math.pi / 4}, {"beta": math.pi}])
print(res.estimate, [c["beta"] for c in res.controls[:5]])
