# %% [markdown]
# # Local measurements against the global optimum
#
# The SLD at a guess `eta0` gives the measurement that is best if `eta` is
# already known to be near `eta0`. Here we score those measurements under
# the broad Haldane prior (a = 0.01, beta = pi/2) for three azimuths.
#
# The measurement axis is taken at azimuth `-alpha` (complex conjugated SLD
# eigenbasis). With the eigenbasis used as is, rotation symmetry about z
# makes all three curves identical.

# %%
import math

import numpy as np

from symmetro import figure1_sweep

eta0 = np.linspace(0.01, 0.99, 99)
alphas = [0.0, math.pi / 4, math.pi / 2]
rows = figure1_sweep(0.01, math.pi / 2, alphas, eta0)
prior_error, min_error = rows[0].prior_error, rows[0].min_error
curves = {al: np.array([r.mhe for r in rows if r.alpha == al]) for al in alphas}

for al, c in curves.items():
    print(f"alpha={al:.3f}  at 1/2: {c[49]:.6f}  at 0.01: {c[0]:.6f}")
print("prior", prior_error, "minimum", min_error)

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for (al, c), name in zip(curves.items(), ("0", "pi/4", "pi/2")):
        ax.plot(eta0, c, label=f"alpha = {name}")
    ax.axhline(prior_error, color="k", ls="--", lw=0.8, label="prior")
    ax.axhline(min_error, color="k", ls=":", lw=0.8, label="optimal")
    ax.set_xlabel("eta0")
    ax.set_ylabel("mean hyperbolic error")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig("local_vs_global.png", dpi=120)
