# %% [markdown]
# # Weights as location parameters
#
# A weight `theta` in (0, 1) becomes a location under the map
# `f(theta) = 2 artanh(2 theta - 1)`, the log-odds. Complete ignorance about
# a weight is then a flat prior in `f`, which in `theta` is the Haldane
# density `1 / (theta (1 - theta))` truncated to `(a, 1 - a)`.

# %%
import numpy as np

from symmetro import DistanceFunction, check_prior_invariance, haldane_prior, integrate, make_fmap, mobius

f = make_fmap("weight")
print(f(np.array([0.1, 0.5, 0.9])))

# %% [markdown]
# Rescaling the odds by `gamma` is a shift in `f`, so the distance
# `|f(x) - f(y)|^2` does not notice it.

# %%
d = DistanceFunction(f, 2)
x, y, gamma = 0.2, 0.7, 3.5
print(d(x, y), d(mobius(x, gamma), mobius(y, gamma)))

# %% [markdown]
# The Haldane density satisfies the matching functional equation; the
# residual is at rounding level.

# %%
print(check_prior_invariance(lambda t: 1 / (t * (1 - t)), 2.0, 200))

# %% [markdown]
# With the truncation at `a`, `f` is uniform on `[-kappa/2, kappa/2]`, so
# the prior variance of `f` is `kappa^2 / 12`.

# %%
prior = haldane_prior(0.01)
kappa = prior.params["kappa"]
var_f = integrate(lambda t: f(t) ** 2, prior) - integrate(f, prior) ** 2
print(kappa, var_f, kappa ** 2 / 12)
