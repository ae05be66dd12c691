"""Blend-parameter qubit: ``rho(eta) = eta |0><0| + (1 - eta) tau``.

``tau = (1 + n.sigma) / 2`` is the pure state with Bloch direction ``n``
(azimuth ``alpha``, polar angle ``beta``). With a Haldane prior on
``(a, 1 - a)`` and the weight map, the optimal strategy has a closed form,
collected by :func:`closed_forms`, which is the reference the generic
solver is tested against.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import DomainError, SymmetroError
from .maps import weight_fmap
from .operators import PAULI
from .personick import Pom, StateFamily, build_moments, evaluate_pom_error, sld_pom, solve_optimal
from .priors import QuadratureRule, haldane_kappa, haldane_prior
from .special import dilog

__all__ = [
    "BlochDirection",
    "BlendClosedForms",
    "Figure1Row",
    "tau",
    "blend_family",
    "closed_forms",
    "blend_chi",
    "optimal_eigenstates",
    "figure1_sweep",
]

KET0 = np.array([[1, 0], [0, 0]], dtype=complex)


@dataclass(frozen=True)
class BlochDirection:
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0 < self.beta <= math.pi:
            raise DomainError(f"polar angle must lie in (0, pi], got {self.beta!r}")
        if not np.isfinite(self.alpha):
            raise DomainError("azimuth must be finite")
        object.__setattr__(self, "alpha", float(self.alpha) % (2 * math.pi))

    @property
    def vector(self):
        sb = math.sin(self.beta)
        return np.array([sb * math.cos(self.alpha), sb * math.sin(self.alpha), math.cos(self.beta)])

    def as_controls(self):
        return {"alpha": self.alpha, "beta": self.beta}


def tau(direction: BlochDirection):
    n = direction.vector
    return 0.5 * (PAULI[0] + n[0] * PAULI[1] + n[1] * PAULI[2] + n[2] * PAULI[3])


def _direction(y):
    return BlochDirection(y["alpha"], y["beta"])


def blend_family(direction: BlochDirection) -> StateFamily:
    """Qubit family over ``eta`` in (0, 1); controls are ``alpha`` and ``beta``."""

    def state_of(eta, y):
        t = tau(_direction(y))
        return eta * KET0 + (1.0 - eta) * t

    def derivative_of(eta, y):
        return KET0 - tau(_direction(y))

    return StateFamily(2, state_of, derivative_of, direction.as_controls())


@dataclass(frozen=True)
class BlendClosedForms:
    a: float
    kappa: float
    chi: float
    s_plus: float
    s_minus: float
    min_error: float
    prior_error: float
    gain: float
    gain_ratio: float


def blend_chi(a, kappa=None):
    kappa = haldane_kappa(a) if kappa is None else kappa
    return -math.log(a * (1.0 - a)) / 4.0 + (dilog(a) - dilog(1.0 - a)) / kappa


def closed_forms(a: float, direction: BlochDirection) -> BlendClosedForms:
    if not 0 < a < 0.5:
        raise DomainError(f"need 0 < a < 1/2, got {a!r}")
    kappa = haldane_kappa(a)
    chi = blend_chi(a, kappa)
    half = math.sin(direction.beta / 2)
    s = 2.0 * chi * half
    prior_error = kappa ** 2 / 12.0
    gain = 4.0 * chi ** 2 * half ** 2
    return BlendClosedForms(
        a=a, kappa=kappa, chi=chi, s_plus=s, s_minus=-s,
        min_error=prior_error - gain, prior_error=prior_error, gain=gain,
        gain_ratio=48.0 * chi ** 2 * half ** 2 / kappa ** 2,
    )


def optimal_eigenstates(direction: BlochDirection):
    """Eigenvectors ``(|s+>, |s->)`` of the optimal operator, normalised."""
    half = direction.beta / 2
    c, s = math.cos(half), math.sin(half)
    phase = np.exp(1j * direction.alpha)
    if direction.beta == math.pi:
        # removable singularity of the + branch
        return np.array([1.0, 0.0], dtype=complex), np.array([0.0, phase], dtype=complex)
    plus = np.array([c, (s - 1.0) * phase]) / math.sqrt(2.0 * (1.0 - s))
    minus = np.array([c, (s + 1.0) * phase]) / math.sqrt(2.0 * (1.0 + s))
    return plus, minus


@dataclass(frozen=True)
class Figure1Row:
    alpha: float
    eta0: float
    mhe: float
    prior_error: float
    min_error: float
    error: str = ""


def figure1_sweep(a, beta, alphas, eta0_grid, rule: Optional[QuadratureRule] = None,
                  conjugate_pom=True, threads=1):
    """Mean hyperbolic error of SLD measurements, one row per ``(alpha, eta0)``.

    For each cell the SLD of the blend family at ``eta0`` is diagonalised and
    its eigenprojectors are used as the POM, with the Bayes estimator for
    that POM. With ``conjugate_pom`` (default) the projectors are complex
    conjugated first, i.e. the measurement axis is reflected to azimuth
    ``-alpha``, so that ``alpha = 0`` saturates the minimum at ``eta0 = 1/2``
    while ``alpha = pi/2`` gains nothing there. With ``conjugate_pom=False`` the SLD eigenbasis is used as
    is, and rotation symmetry about z makes every ``alpha`` give the same
    curve.
    """
    for eta0 in eta0_grid:
        if not a <= eta0 <= 1 - a:
            raise DomainError(f"eta0={eta0} outside [{a}, {1 - a}]")
    prior = haldane_prior(a)
    fm = weight_fmap()
    cells = [(float(al), float(e)) for al in alphas for e in eta0_grid]

    references = {}
    for al in sorted({c[0] for c in cells}):
        family = blend_family(BlochDirection(al, beta))
        moments = build_moments(family, prior, fm, rule=rule)
        references[al] = (family, moments, solve_optimal(moments, fm))

    def run(cell):
        al, eta0 = cell
        family, moments, opt = references[al]
        try:
            pom = sld_pom(family, eta0)
            if conjugate_pom:
                pom = Pom(tuple(e.conj() for e in pom.elements), pom.labels)
            mhe = evaluate_pom_error(moments, pom)
            return Figure1Row(al, eta0, mhe, opt.prior_error, opt.min_error)
        except SymmetroError as exc:
            return Figure1Row(al, eta0, float("nan"), opt.prior_error, opt.min_error, str(exc))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(run, cells))
    return [run(c) for c in cells]
