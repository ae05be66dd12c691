"""Optimal Bayesian strategies for location-isomorphic parameters.

Given a state family, a prior and an f-map, the optimal measurement is the
spectral measurement of the operator ``S`` solving ``S r0 + r0 S = 2 r1``,
where ``r_l`` is the prior average of ``rho(theta) f(theta)**l``. The
optimal estimate for outcome ``s`` is ``f^{-1}(s)`` and the minimum mean
quadratic error is the prior variance of ``f`` minus the gain
``Tr(r0 S^2) - Tr(r0 S)^2``.
"""
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .exceptions import EstimatorRangeError, IntegrationError, PomError, ZeroProbabilityError
from .maps import FMap
from .operators import (
    ProjectorSet,
    as_density,
    as_hermitian,
    eigendecompose,
    project_eigenspaces,
    solve_sylvester,
    spectral_norm,
)
from .priors import QuadratureRule

__all__ = [
    "StateFamily",
    "MomentOperators",
    "PersonickSolution",
    "Pom",
    "build_moments",
    "solve_optimal",
    "evaluate_pom_error",
    "pom_moments",
    "sld",
    "sld_pom",
    "outcome_statistics",
]


@dataclass(frozen=True)
class StateFamily:
    """``rho_y(theta)`` on a ``dim``-dimensional space.

    ``state_of(theta, controls)`` returns a density matrix; ``controls``
    holds default values for the control parameters ``y``.
    ``derivative_of(theta, controls)``, when given, returns the exact
    ``d rho / d theta``.
    """

    dim: int
    state_of: Callable
    derivative_of: Optional[Callable] = None
    controls: Mapping = field(default_factory=dict)

    def resolve(self, y=None):
        return {**self.controls, **(y or {})}

    def state(self, theta, y=None):
        return np.asarray(self.state_of(theta, self.resolve(y)), dtype=complex)

    def derivative(self, theta, y=None, step=None):
        y = self.resolve(y)
        if self.derivative_of is not None:
            return np.asarray(self.derivative_of(theta, y), dtype=complex)
        if step is None:
            step = np.finfo(float).eps ** (1 / 3) * max(abs(theta), 1.0)
        return (np.asarray(self.state_of(theta + step, y), dtype=complex)
                - np.asarray(self.state_of(theta - step, y), dtype=complex)) / (2 * step)

    def check(self, support, y=None, points=16, tol: Tolerances = DEFAULT_TOLERANCES):
        lo, hi = support
        for t in lo + (hi - lo) * (np.arange(points) + 0.5) / points:
            rho = as_density(self.state(t, y), tol)
            if rho.shape != (self.dim, self.dim):
                raise ValueError(f"state at theta={t} has shape {rho.shape}, expected dim {self.dim}")


@dataclass(frozen=True)
class MomentOperators:
    zeta: float           # E[f^2]
    rho0: np.ndarray      # E[rho]
    rho1: np.ndarray      # E[rho f]
    prior_mean_f: float   # E[f]

    @property
    def prior_error(self):
        return self.zeta - self.prior_mean_f ** 2


@dataclass(frozen=True)
class Pom:
    """A finite POM: positive operators summing to the identity."""

    elements: tuple
    labels: tuple = ()

    def __post_init__(self):
        elements = tuple(as_hermitian(e) for e in self.elements)
        if not elements:
            raise PomError("a POM needs at least one element")
        object.__setattr__(self, "elements", elements)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(len(elements))))
        elif len(self.labels) != len(elements):
            raise PomError("one label per POM element required")
        self.validate()

    def validate(self, tol: Tolerances = DEFAULT_TOLERANCES):
        dim = self.elements[0].shape[0]
        for k, e in enumerate(self.elements):
            if e.shape != (dim, dim):
                raise PomError(f"element {k} has shape {e.shape}")
            if np.linalg.eigvalsh(e)[0] < -tol.psd:
                raise PomError(f"element {k} is not positive semidefinite")
        if spectral_norm(sum(self.elements) - np.eye(dim)) > tol.pom_completeness:
            raise PomError("POM elements do not sum to the identity")

    def __len__(self):
        return len(self.elements)

    @classmethod
    def from_projectors(cls, ps: ProjectorSet):
        return cls(tuple(ps.projectors), tuple(float(l) for l in ps.labels))

    @classmethod
    def from_basis(cls, vectors, labels=()):
        """Projective POM onto the columns of a unitary matrix."""
        v = np.asarray(vectors, dtype=complex)
        return cls(tuple(np.outer(v[:, k], v[:, k].conj()) for k in range(v.shape[1])), tuple(labels))

    def probabilities(self, rho):
        return np.array([np.trace(e @ rho).real for e in self.elements])


@dataclass(frozen=True)
class PersonickSolution:
    S: np.ndarray
    pom: ProjectorSet
    estimates: np.ndarray
    min_error: float
    gain: float
    prior_error: float
    pseudo_inverse: bool = False

    @property
    def eigenvalues(self):
        return self.pom.labels

    @property
    def gain_ratio(self):
        return self.gain / self.prior_error if self.prior_error > 0 else 0.0

    def as_pom(self):
        return Pom.from_projectors(self.pom)


def build_moments(family: StateFamily, prior, fmap: FMap, y=None,
                  rule: Optional[QuadratureRule] = None,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> MomentOperators:
    """Prior averages of ``f**2``, ``rho`` and ``rho f``.

    ``prior`` is a :class:`~symmetro.priors.PriorDensity` or anything else
    with a ``discretize`` method (a posterior grid, for instance).
    """
    y = family.resolve(y)
    if hasattr(prior, "support"):
        lo, hi = prior.support
        if not (fmap.contains(lo, closed=True) and fmap.contains(hi, closed=True)):
            raise ValueError(f"prior support {prior.support} not inside the f-map domain {fmap.domain}")
        family.check(prior.support, y, tol=tol)

    theta, w, _ = prior.discretize(rule)
    states = np.array([family.state(t, y) for t in theta])
    if states.shape[1:] != (family.dim, family.dim):
        raise ValueError(f"states have shape {states.shape[1:]}, expected {(family.dim,) * 2}")
    f = np.asarray(fmap.forward(theta), dtype=float)
    bad = ~(np.isfinite(f) & np.all(np.isfinite(states), axis=(1, 2)))
    if np.any(bad):
        raise IntegrationError(f"integrand is not finite at node theta={theta[np.argmax(bad)]!r}")
    zeta = np.sum(w * f * f)
    mean_f = np.sum(w * f)
    rho0 = np.einsum("k,kij->ij", w, states)
    rho1 = np.einsum("k,kij->ij", w * f, states)
    rho0 = 0.5 * (rho0 + rho0.conj().T)
    rho1 = 0.5 * (rho1 + rho1.conj().T)
    as_density(rho0, tol)
    return MomentOperators(float(zeta), rho0, rho1, float(mean_f))


def solve_optimal(moments: MomentOperators, fmap: FMap, merge_tol: float = DEFAULT_TOLERANCES.merge,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> PersonickSolution:
    S, info = solve_sylvester(moments.rho0, moments.rho1, tol, full_output=True)
    pom = project_eigenspaces(eigendecompose(S, tol), merge_tol)
    if not fmap.in_range(pom.labels):
        raise EstimatorRangeError(
            f"spectrum {pom.labels} of S leaves the range {fmap.range} of the {fmap.kind} map"
        )
    estimates = np.asarray(fmap.inverse(pom.labels), dtype=float)
    r0S = moments.rho0 @ S
    gain = float(np.trace(r0S @ S).real - np.trace(r0S).real ** 2)
    prior_error = moments.prior_error
    return PersonickSolution(S, pom, estimates, prior_error - gain, gain, prior_error, info["pseudo"])


def outcome_statistics(moments: MomentOperators, pom: Pom):
    """Per-outcome prior-predictive probability ``w_x`` and ``Tr(M_x r1)``."""
    w = np.array([np.trace(m @ moments.rho0).real for m in pom.elements])
    t1 = np.array([np.trace(m @ moments.rho1).real for m in pom.elements])
    return w, t1


def evaluate_pom_error(moments: MomentOperators, pom: Pom, estimator=None,
                       tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Mean quadratic error of a fixed POM.

    Without ``estimator`` each outcome is assigned the posterior mean of
    ``f``, the best estimate for that POM. Otherwise ``estimator`` holds one
    f-value per POM element.
    """
    w, t1 = outcome_statistics(moments, pom)
    dead = w <= tol.zero_probability
    if np.any(dead & (np.abs(t1) > 1e-12)):
        k = int(np.argmax(dead & (np.abs(t1) > 1e-12)))
        raise ZeroProbabilityError(f"outcome {pom.labels[k]} has zero probability but nonzero first moment")
    live = ~dead
    if estimator is None:
        g = t1[live] / w[live]
        return float(moments.zeta - np.sum(w[live] * g * g))
    est = np.asarray(estimator, dtype=float)
    if est.shape != (len(pom),):
        raise ValueError(f"need one estimate per POM element ({len(pom)}), got shape {est.shape}")
    e = est[live]
    return float(moments.zeta + np.sum(w[live] * e * e - 2.0 * t1[live] * e))


def pom_moments(pom: Pom, f_values):
    """``A_l = sum_x M_x f_x**l`` for ``l = 1, 2``."""
    f = np.asarray(f_values, dtype=float)
    a1 = sum(m * v for m, v in zip(pom.elements, f))
    a2 = sum(m * v * v for m, v in zip(pom.elements, f))
    return a1, a2


def sld(family: StateFamily, theta0, y=None, step=None, tol: Tolerances = DEFAULT_TOLERANCES):
    """Symmetric logarithmic derivative ``L`` with ``L rho + rho L = 2 d rho``."""
    rho = family.state(theta0, y)
    drho = family.derivative(theta0, y, step)
    drho = 0.5 * (drho + drho.conj().T)
    return solve_sylvester(rho, drho, tol)


def sld_pom(family: StateFamily, theta0, y=None, merge_tol=DEFAULT_TOLERANCES.merge, step=None):
    """Projective POM onto the eigenspaces of the SLD at ``theta0``."""
    return Pom.from_projectors(project_eigenspaces(eigendecompose(sld(family, theta0, y, step)), merge_tol))
