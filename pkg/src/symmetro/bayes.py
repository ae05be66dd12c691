"""Multi-shot estimation on a gridded posterior.

The posterior lives on the prior's quadrature nodes and is stored as log
weights, so long outcome sequences do not underflow. The estimate after
any number of shots is ``f^{-1}`` of the posterior mean of ``f``; for the
weight map this is ``(1 + tanh(E[artanh(2 theta - 1)])) / 2``.
"""
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from .exceptions import EstimatorRangeError, ImpossibleOutcomeError, PomError, SymmetroError
from .maps import FMap
from .personick import Pom, StateFamily, build_moments, solve_optimal
from .priors import QuadratureRule

__all__ = [
    "PosteriorGrid",
    "ShotRecord",
    "ProtocolResult",
    "sample_outcome",
    "likelihoods",
    "update_posterior",
    "estimate",
    "posterior_variance",
    "credible_interval",
    "adaptive_next_control",
    "run_protocol",
]


@dataclass(frozen=True)
class PosteriorGrid:
    u_nodes: np.ndarray       # nodes in the prior's integration coordinate
    theta_nodes: np.ndarray
    log_weights: np.ndarray   # normalised: logsumexp == 0
    normalization: float = 0.0  # log of the mass removed at the last renormalisation

    @classmethod
    def from_prior(cls, prior, rule: Optional[QuadratureRule] = None):
        theta, w, u = prior.discretize(rule)
        with np.errstate(divide="ignore"):
            logw = np.log(w)
        norm = logsumexp(logw)
        return cls(np.asarray(u), np.asarray(theta), logw - norm, float(norm))

    @classmethod
    def point_mass(cls, theta0):
        return cls(np.array([theta0]), np.array([theta0]), np.array([0.0]))

    @property
    def weights(self):
        return np.exp(self.log_weights)

    def discretize(self, rule=None):
        return self.theta_nodes, self.weights, self.u_nodes

    def mean(self, g):
        return float(np.sum(self.weights * np.asarray(g(self.theta_nodes), dtype=float)))


@dataclass(frozen=True)
class ShotRecord:
    index: int
    control: dict
    outcome: object
    likelihoods: np.ndarray = field(repr=False)


def sample_outcome(family: StateFamily, theta_true, y, pom: Pom, rng: np.random.Generator,
                   tol: float = 1e-9):
    """Draw an outcome index with Born-rule probabilities ``Tr(M_x rho_y(theta_true))``."""
    probs = pom.probabilities(family.state(theta_true, y))
    if abs(probs.sum() - 1.0) > tol or np.any(probs < -tol):
        raise PomError(f"outcome probabilities {probs} do not form a distribution")
    probs = np.clip(probs, 0.0, None)
    return int(rng.choice(len(probs), p=probs / probs.sum()))


def likelihoods(family: StateFamily, grid: PosteriorGrid, y, element):
    """``Tr(M rho_y(theta))`` at each grid node."""
    states = np.array([family.state(t, y) for t in grid.theta_nodes])
    vals = np.einsum("ij,kji->k", element, states).real
    return np.clip(vals, 0.0, 1.0)


def update_posterior(grid: PosteriorGrid, record: ShotRecord) -> PosteriorGrid:
    lik = np.asarray(record.likelihoods, dtype=float)
    if lik.shape != grid.log_weights.shape:
        raise ValueError("likelihood vector does not match the grid")
    with np.errstate(divide="ignore"):
        logw = grid.log_weights + np.log(lik)
    norm = logsumexp(logw)
    if not np.isfinite(norm) or norm < np.log(1e-300):
        raise ImpossibleOutcomeError(f"outcome {record.outcome!r} at shot {record.index} has zero likelihood")
    return replace(grid, log_weights=logw - norm, normalization=float(norm))


def estimate(grid: PosteriorGrid, fmap: FMap):
    m = grid.mean(fmap.forward)
    if not fmap.in_range(m):
        raise EstimatorRangeError(f"posterior mean {m} outside the range of the {fmap.kind} map")
    return float(fmap.inverse(m))


def posterior_variance(grid: PosteriorGrid, fmap: FMap):
    f = np.asarray(fmap.forward(grid.theta_nodes), dtype=float)
    w = grid.weights
    m = np.sum(w * f)
    return float(np.sum(w * (f - m) ** 2))


def credible_interval(grid: PosteriorGrid, level=0.95):
    """Central ``level`` interval of the posterior in ``theta``.

    Each node's mass is centred on the node, so the CDF is evaluated at
    midpoints before interpolation.
    """
    order = np.argsort(grid.theta_nodes)
    t = grid.theta_nodes[order]
    w = grid.weights[order]
    cdf = np.cumsum(w) - 0.5 * w
    tail = (1.0 - level) / 2
    return float(np.interp(tail, cdf, t)), float(np.interp(1.0 - tail, cdf, t))


def adaptive_next_control(grid, family: StateFamily, fmap: FMap, candidates: Sequence,
                          rule=None, full_output=False):
    """Candidate control with the largest precision gain against ``grid`` as prior."""
    if not candidates:
        raise ValueError("no candidate controls")
    best, best_gain, gains, errors = None, -np.inf, [], []
    for y in candidates:
        try:
            g = solve_optimal(build_moments(family, grid, fmap, y, rule), fmap).gain
        except SymmetroError as exc:
            errors.append(exc)
            gains.append(float("nan"))
            continue
        gains.append(g)
        if g > best_gain:
            best, best_gain = y, g
    if best is None:
        raise SymmetroError(f"every candidate control failed: {errors[0]}") from errors[0]
    if full_output:
        return best, gains
    return best


@dataclass(frozen=True)
class ProtocolResult:
    estimate: float
    error_trace: np.ndarray      # posterior variance of f after each shot
    estimates: np.ndarray        # running estimate after each shot
    outcomes: tuple              # outcome labels (spectral values)
    controls: tuple
    posterior: PosteriorGrid

    def __iter__(self):
        return iter((self.estimate, self.error_trace))


def run_protocol(family: StateFamily, prior, fmap: FMap, policy="fixed", mu=1, theta_true=0.5,
                 seed=0, control=None, candidates=None, rule=None) -> ProtocolResult:
    """Simulate ``mu`` shots and process them jointly.

    ``fixed`` repeats the optimal strategy for the prior at ``control``;
    ``adaptive`` re-optimises before every shot, choosing among
    ``candidates`` by precision gain against the current posterior.
    """
    if mu < 1:
        raise ValueError("mu must be at least 1")
    if policy not in ("fixed", "adaptive"):
        raise ValueError(f"unknown policy {policy!r}")
    rng = np.random.default_rng(np.uint64(seed))
    grid = PosteriorGrid.from_prior(prior, rule)
    y = family.resolve(control)
    if policy == "adaptive":
        candidates = [family.resolve(c) for c in (candidates or [y])]
    else:
        pom = solve_optimal(build_moments(family, prior, fmap, y, rule), fmap).as_pom()
        # nodes never move, so the likelihood of each outcome is fixed
        cached = [likelihoods(family, grid, y, e) for e in pom.elements]

    trace, ests, outcomes, controls = [], [], [], []
    for i in range(mu):
        if policy == "adaptive":
            y = adaptive_next_control(grid, family, fmap, candidates, rule)
            pom = solve_optimal(build_moments(family, grid, fmap, y, rule), fmap).as_pom()
        k = sample_outcome(family, theta_true, y, pom, rng)
        lik = cached[k] if policy == "fixed" else likelihoods(family, grid, y, pom.elements[k])
        record = ShotRecord(i, dict(y), pom.labels[k], lik)
        grid = update_posterior(grid, record)
        trace.append(posterior_variance(grid, fmap))
        ests.append(estimate(grid, fmap))
        outcomes.append(pom.labels[k])
        controls.append(dict(y))
    return ProtocolResult(ests[-1], np.array(trace), np.array(ests), tuple(outcomes), tuple(controls), grid)
