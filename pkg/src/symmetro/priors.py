"""Prior densities and the quadrature used to average over them."""
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .config import DEFAULT_TOLERANCES
from .exceptions import DomainError, IntegrationError
from .maps import FMap, weight_fmap

__all__ = [
    "QuadratureRule",
    "gauss_legendre",
    "PriorDensity",
    "ignorance_prior",
    "haldane_prior",
    "haldane_kappa",
    "uniform_prior",
    "table_prior",
    "integrate",
    "check_prior_invariance",
    "DEFAULT_ORDER",
]

DEFAULT_ORDER = 200


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def on(self, lo, hi):
        half = 0.5 * (hi - lo)
        return lo + half * (self.nodes + 1.0), half * self.weights


@lru_cache(maxsize=32)
def gauss_legendre(order: int = DEFAULT_ORDER) -> QuadratureRule:
    if order < 1:
        raise ValueError("quadrature order must be at least 1")
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w, order)


@dataclass(frozen=True)
class PriorDensity:
    """A normalised density on ``support``.

    If ``coordinate`` is set, integrals are computed over ``u = coordinate(theta)``
    rather than ``theta``; for ignorance priors the density is then constant in ``u``.
    ``breakpoints`` split the support into pieces that are integrated separately.
    """

    support: tuple
    density: Callable
    coordinate: Optional[FMap] = None
    breakpoints: tuple = ()
    name: str = "custom"
    params: dict = field(default_factory=dict)
    normalization: float = float("nan")

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        lo, hi = self.support
        inside = (theta >= lo) & (theta <= hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(inside, self.density(np.where(inside, theta, 0.5 * (lo + hi))), 0.0)
        return float(vals) if vals.ndim == 0 else vals

    def discretize(self, rule: Optional[QuadratureRule] = None):
        """Nodes ``theta_k`` and weights ``w_k`` with ``sum_k w_k g(theta_k) ~ E[g]``.

        Returns ``(theta, weights, u)`` where ``u`` are the nodes in the
        integration coordinate.
        """
        rule = rule or gauss_legendre()
        return _discretize(self, rule)

    def with_normalization(self, rule=None):
        _, w, _ = _discretize(self, rule or gauss_legendre())
        return replace(self, normalization=float(np.sum(w)))


def _pieces(prior):
    lo, hi = prior.support
    if prior.coordinate is not None:
        lo, hi = prior.coordinate.forward(lo), prior.coordinate.forward(hi)
        cuts = [float(prior.coordinate.forward(b)) for b in prior.breakpoints]
    else:
        cuts = list(prior.breakpoints)
    edges = [float(lo)] + sorted(c for c in cuts if lo < c < hi) + [float(hi)]
    return list(zip(edges[:-1], edges[1:]))


def _discretize(prior, rule):
    us, ws = [], []
    for a, b in _pieces(prior):
        u, w = rule.on(a, b)
        us.append(u)
        ws.append(w)
    u = np.concatenate(us)
    w = np.concatenate(ws)
    if prior.coordinate is not None:
        theta = np.asarray(prior.coordinate.inverse(u), dtype=float)
        jac = 1.0 / np.asarray(prior.coordinate.derivative(theta), dtype=float)
    else:
        theta = u
        jac = 1.0
    weights = w * prior.density(theta) * jac
    return theta, weights, u


def _finalize(prior: PriorDensity, tol=DEFAULT_TOLERANCES.normalization):
    prior = prior.with_normalization()
    if abs(prior.normalization - 1.0) > tol:
        raise IntegrationError(f"{prior.name} prior integrates to {prior.normalization!r}, not 1")
    return prior


def ignorance_prior(fmap: FMap, support) -> PriorDensity:
    """``p(theta) proportional to f'(theta)`` on ``support``: uniform in ``f``."""
    lo, hi = map(float, support)
    if not (fmap.contains(lo, closed=True) and fmap.contains(hi, closed=True) and lo < hi):
        raise DomainError(f"support {support} not inside the {fmap.kind} map domain")
    width = float(fmap.forward(hi) - fmap.forward(lo))
    if not (np.isfinite(width) and width > 0):
        raise DomainError("ignorance prior needs a support of finite f-length")
    deriv = fmap.derivative
    return _finalize(PriorDensity((lo, hi), lambda t: deriv(t) / width, fmap,
                                  name=f"{fmap.kind}-ignorance", params={"f_length": width}))


def haldane_kappa(a):
    """``4 artanh(1 - 2a) = 2 log((1 - a) / a)``."""
    return 2.0 * (math.log1p(-a) - math.log(a))


def haldane_prior(a: float) -> PriorDensity:
    """Normalised Haldane prior ``1 / (kappa theta (1 - theta))`` on ``(a, 1 - a)``."""
    if not 0 < a < 0.5:
        raise DomainError(f"Haldane prior needs 0 < a < 1/2, got {a!r}")
    kappa = haldane_kappa(a)
    fm = weight_fmap()
    prior = PriorDensity((a, 1.0 - a), lambda t: 1.0 / (kappa * t * (1.0 - t)), fm,
                         name="haldane", params={"a": a, "kappa": kappa})
    return _finalize(prior)


def uniform_prior(lo, hi) -> PriorDensity:
    lo, hi = float(lo), float(hi)
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise DomainError(f"uniform prior needs a finite interval, got ({lo}, {hi})")
    width = hi - lo
    return _finalize(PriorDensity((lo, hi), lambda t: np.full_like(np.asarray(t, dtype=float), 1.0 / width),
                                  name="uniform", params={"lo": lo, "hi": hi}))


def table_prior(theta, density) -> PriorDensity:
    """Piecewise-linear density through the given samples, rescaled to unit mass."""
    theta = np.asarray(theta, dtype=float)
    dens = np.asarray(density, dtype=float)
    if theta.ndim != 1 or theta.shape != dens.shape or len(theta) < 2:
        raise DomainError("table prior needs matching 1-d theta and density arrays (length >= 2)")
    if np.any(np.diff(theta) <= 0):
        raise DomainError("table prior theta values must increase strictly")
    if np.any(dens < 0) or not np.all(np.isfinite(dens)):
        raise DomainError("table prior density must be finite and non-negative")
    mass = float(np.sum(0.5 * (dens[1:] + dens[:-1]) * np.diff(theta)))
    if mass <= 0:
        raise DomainError("table prior has zero mass")
    dens = dens / mass
    return _finalize(PriorDensity((theta[0], theta[-1]), lambda t: np.interp(t, theta, dens),
                                  breakpoints=tuple(theta[1:-1]), name="table",
                                  params={"theta": theta, "density": dens}))


def integrate(g, prior, rule: Optional[QuadratureRule] = None):
    """``integral of p(theta) g(theta) d theta`` by quadrature.

    ``g`` may return scalars or arrays (operators); the average is then
    taken entrywise. ``prior`` is anything with a ``discretize(rule)``
    method, so posterior grids work as well.
    """
    theta, w, _ = prior.discretize(rule)
    total = None
    for t, wk in zip(theta, w):
        val = np.asarray(g(t))
        if not np.all(np.isfinite(val)):
            raise IntegrationError(f"integrand is not finite at node theta={t!r}")
        total = wk * val if total is None else total + wk * val
    if total.ndim == 0:
        return float(total.real) if np.isrealobj(total) else complex(total)
    return total


def check_prior_invariance(p, gamma, samples=100):
    """Largest residual of ``(1 - t + gamma t)**2 p(t) - gamma p(mobius(t, gamma))``.

    ``p`` is a callable density (normalised or not). Zero residual means the
    density is invariant under odds rescalings by ``gamma``.
    """
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    t = np.linspace(0.0, 1.0, samples + 2)[1:-1]
    t2 = gamma * t / (1.0 - t + gamma * t)
    lhs = (1.0 - t + gamma * t) ** 2 * np.asarray(p(t), dtype=float)
    rhs = gamma * np.asarray(p(t2), dtype=float)
    return float(np.max(np.abs(lhs - rhs)))
