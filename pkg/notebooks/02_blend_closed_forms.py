# %% [markdown]
# # The blend qubit
#
# `rho(eta) = eta |0><0| + (1 - eta) tau`, with `tau` a pure state at polar
# angle `beta`. Under a Haldane prior the optimal operator is
# `S = 2 chi (|0><0| - tau)`, and the generic solver should find exactly
# that.

# %%
import math

import numpy as np

from symmetro import BlochDirection, blend_family, build_moments, closed_forms, haldane_prior, make_fmap, solve_optimal
from symmetro.blend import KET0, tau

a = 0.01
d = BlochDirection(math.pi / 3, math.pi / 2)
f = make_fmap("weight")
sol = solve_optimal(build_moments(blend_family(d), haldane_prior(a), f), f)
cf = closed_forms(a, d)

print("S error   ", np.linalg.norm(sol.S - 2 * cf.chi * (KET0 - tau(d)), 2))
print("spectrum  ", sol.eigenvalues, (cf.s_minus, cf.s_plus))
print("estimates ", sol.estimates)
print("min error ", sol.min_error, cf.min_error)

# %% [markdown]
# The fraction of the prior error removed by one optimal shot grows like
# `sin^2(beta / 2)`. Its a -> 0 limit is 3/4, but the approach is only
# logarithmic in `a`: roughly `3/4 - 2 pi^2 / kappa^2`.

# %%
for a in (0.49, 0.3, 0.1, 0.01, 1e-3, 1e-6, 1e-12):
    cf = closed_forms(a, BlochDirection(0.0, math.pi))
    line = f"a={a:<7g} gain_ratio={cf.gain_ratio:.6f}"
    if a <= 0.01:
        line += f"  3/4 - 2pi^2/kappa^2={0.75 - 2 * math.pi ** 2 / cf.kappa ** 2:.6f}"
    print(line)

# %% [markdown]
# Near `a = 1/2` the prior is already narrow and the gain is small,
# approximately `sin^2(beta/2) (2a - 1)^2 / 3`.

# %%
cf = closed_forms(0.49, BlochDirection(0.0, math.pi / 2))
print(cf.gain_ratio, 0.5 * (2 * 0.49 - 1) ** 2 / 3)
