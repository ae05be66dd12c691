"""f-maps taking location-isomorphic parameters to locations, and the errors they induce."""
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy import integrate as _integrate
from scipy import optimize as _optimize
from scipy.special import expit, logit

from .exceptions import DomainError

__all__ = [
    "FMap",
    "make_fmap",
    "location_fmap",
    "scale_fmap",
    "weight_fmap",
    "fisher_fmap",
    "custom_fmap",
    "DistanceFunction",
    "evaluate_distance",
    "mobius",
]

KINDS = ("location", "scale", "weight", "fisher", "custom")


def _sample_points(domain, n=64):
    lo, hi = domain
    t = (np.arange(n) + 0.5) / n
    if np.isfinite(lo) and np.isfinite(hi):
        return lo + (hi - lo) * t
    if np.isfinite(lo):
        return lo + np.exp(np.linspace(-8, 8, n))
    if np.isfinite(hi):
        return hi - np.exp(np.linspace(-8, 8, n))
    return np.tan(np.pi * (t - 0.5)) * 10.0


@dataclass(frozen=True)
class FMap:
    """An increasing bijection ``f`` from a parameter interval onto a location range."""

    kind: str
    forward: Callable
    inverse: Callable
    derivative: Callable
    domain: tuple
    range: tuple
    params: dict

    def __call__(self, theta):
        return self.forward(theta)

    def contains(self, theta, closed=False):
        lo, hi = self.domain
        theta = np.asarray(theta)
        if closed:
            return bool(np.all((theta >= lo) & (theta <= hi)))
        return bool(np.all((theta > lo) & (theta < hi)))

    def in_range(self, s):
        lo, hi = self.range
        s = np.asarray(s)
        return bool(np.all((s >= lo) & (s <= hi)))

    def shifted(self, c):
        """The same map plus a constant ``c``."""
        fwd, inv = self.forward, self.inverse
        return replace(
            self,
            forward=lambda theta: fwd(theta) + c,
            inverse=lambda s: inv(np.asarray(s) - c),
            range=(self.range[0] + c, self.range[1] + c),
            params={**self.params, "offset": self.params.get("offset", 0.0) + c},
        )

    def validate(self, n=64):
        theta = _sample_points(self.domain, n)
        d = np.asarray(self.derivative(theta), dtype=float)
        if not np.all(d > 0):
            raise DomainError(f"{self.kind} map is not strictly increasing on {self.domain}")
        back = np.asarray(self.inverse(self.forward(theta)), dtype=float)
        err = np.abs(back - theta) / np.maximum(np.abs(theta), 1.0)
        if err.max() > 1e-10:
            raise DomainError(f"{self.kind} map inverse fails the roundtrip (error {err.max():.2e})")
        return self


def location_fmap():
    ident = lambda z: np.asarray(z, dtype=float) * 1.0
    return FMap(
        "location", ident, ident, lambda z: np.ones_like(np.asarray(z, dtype=float)),
        (-np.inf, np.inf), (-np.inf, np.inf), {},
    )


def scale_fmap(z0=1.0):
    if not z0 > 0:
        raise DomainError(f"scale map needs z0 > 0, got {z0!r}")
    return FMap(
        "scale",
        lambda z: np.log(np.asarray(z, dtype=float) / z0),
        lambda s: z0 * np.exp(s),
        lambda z: 1.0 / np.asarray(z, dtype=float),
        (0.0, np.inf), (-np.inf, np.inf), {"z0": z0},
    )


def weight_fmap():
    """``f(z) = 2 artanh(2z - 1)``, evaluated as the logit ``log(z / (1 - z))``."""
    return FMap(
        "weight",
        lambda z: logit(np.asarray(z, dtype=float)),
        lambda s: expit(np.asarray(s, dtype=float)),
        lambda z: 1.0 / (np.asarray(z, dtype=float) * (1.0 - np.asarray(z, dtype=float))),
        (0.0, 1.0), (-np.inf, np.inf), {},
    )


def fisher_fmap(fisher_info, domain, anchor=None, grid=257):
    """``f(z) = integral from anchor to z of sqrt(F(t)) dt`` on a finite domain.

    A table of cumulative integrals on ``grid`` points is built once; forward
    evaluations add an adaptive integral from the nearest table node and
    inversion brackets with the table before a Brent solve to 1e-12.
    """
    lo, hi = map(float, domain)
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise DomainError("fisher map needs a finite domain")
    anchor = lo if anchor is None else float(anchor)
    if not lo <= anchor <= hi:
        raise DomainError(f"anchor {anchor} outside {domain}")

    nodes = np.linspace(lo, hi, grid)
    probe = np.concatenate([nodes[1:-1], _sample_points((lo, hi))])
    f_probe = np.array([fisher_info(t) for t in probe], dtype=float)
    if not np.all(f_probe > 0):
        raise DomainError("Fisher information must be positive on the domain")

    root_f = lambda t: np.sqrt(fisher_info(t))
    pieces = [_integrate.quad(root_f, nodes[k], nodes[k + 1], epsabs=1e-14, epsrel=1e-13)[0]
              for k in range(grid - 1)]
    table = np.concatenate([[0.0], np.cumsum(pieces)])
    k0 = min(np.searchsorted(nodes, anchor, side="right") - 1, grid - 2)
    table -= table[k0] + _integrate.quad(root_f, nodes[k0], anchor, epsabs=1e-14, epsrel=1e-13)[0]

    def _fwd(z):
        if not lo <= z <= hi:
            raise DomainError(f"{z!r} outside fisher map domain {domain}")
        k = min(np.searchsorted(nodes, z, side="right") - 1, grid - 2)
        return table[k] + _integrate.quad(root_f, nodes[k], z, epsabs=1e-14, epsrel=1e-13)[0]

    def _inv(s):
        if not table[0] - 1e-12 <= s <= table[-1] + 1e-12:
            raise DomainError(f"{s!r} outside fisher map range")
        k = int(np.clip(np.searchsorted(table, s, side="right") - 1, 0, grid - 2))
        a, b = nodes[k], nodes[k + 1]
        ga, gb = _fwd(a) - s, _fwd(b) - s
        if ga >= 0:
            return a
        if gb <= 0:
            return b
        return _optimize.brentq(lambda z: _fwd(z) - s, a, b, xtol=1e-12, rtol=4 * np.finfo(float).eps)

    forward = np.vectorize(_fwd, otypes=[float])
    inverse = np.vectorize(_inv, otypes=[float])
    derivative = np.vectorize(root_f, otypes=[float])
    return FMap("fisher", forward, inverse, derivative, (lo, hi), (table[0], table[-1]),
                {"anchor": anchor, "fisher_info": fisher_info})


def custom_fmap(forward, inverse, derivative, domain, value_range=(-np.inf, np.inf)):
    return FMap("custom", forward, inverse, derivative, tuple(domain), tuple(value_range), {})


def make_fmap(kind, **params) -> FMap:
    """Build and validate an f-map.

    ``kind`` is one of ``location``, ``scale`` (needs ``z0``), ``weight``,
    ``fisher`` (needs ``fisher_info`` and ``domain``, optional ``anchor``)
    or ``custom`` (needs ``forward``, ``inverse``, ``derivative``,
    ``domain``).
    """
    if kind == "location":
        fm = location_fmap()
    elif kind == "scale":
        fm = scale_fmap(params.get("z0", 1.0))
    elif kind == "weight":
        fm = weight_fmap()
    elif kind == "fisher":
        fm = fisher_fmap(params["fisher_info"], params["domain"], params.get("anchor"))
    elif kind == "custom":
        fm = custom_fmap(params["forward"], params["inverse"], params["derivative"],
                         params["domain"], params.get("value_range", (-np.inf, np.inf)))
    else:
        raise ValueError(f"unknown f-map kind {kind!r}; expected one of {KINDS}")
    return fm.validate()


def mobius(theta, gamma):
    """Odds rescaling ``theta -> gamma theta / (1 - theta + gamma theta)``."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma!r}")
    theta = np.asarray(theta, dtype=float)
    if np.any((theta <= 0) | (theta >= 1)):
        raise DomainError("mobius expects theta in (0, 1)")
    out = gamma * theta / (1.0 - theta + gamma * theta)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DistanceFunction:
    fmap: FMap
    k: float = 2.0

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError("distance exponent must be positive")

    def __call__(self, estimate, theta):
        return evaluate_distance(self, estimate, theta)


def evaluate_distance(d: DistanceFunction, estimate, theta):
    """``|f(estimate) - f(theta)|**k``."""
    if not (d.fmap.contains(estimate) and d.fmap.contains(theta)):
        raise DomainError(f"arguments outside the {d.fmap.kind} map domain {d.fmap.domain}")
    out = np.abs(d.fmap.forward(estimate) - d.fmap.forward(theta)) ** d.k
    return float(out) if np.ndim(out) == 0 else out
