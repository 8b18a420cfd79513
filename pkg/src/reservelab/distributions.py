"""Continuous value distributions, virtual values, and the Myerson reserve.

Three families cover everything the rest of the package needs:

  uniform(lo, hi)                phi(v) = 2v - hi, reserve hi/2
  exponential(rate)              phi(v) = v - 1/rate, reserve 1/rate
  truncated equal-revenue(M)     F(b) = 1 - 1/b on [1, M), an atom of mass
                                 1/M at M; phi == 0 on the continuous part,
                                 so no Myerson reserve exists

Sampling is inverse-transform from a seeded numpy Generator, which keeps
every downstream artifact reproducible from (descriptor, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize as sp_optimize

from .errors import DomainError


@dataclass(frozen=True)
class ContinuousDist:
    """A scalar value distribution with density on (lo, hi) and an optional atom at hi."""

    name: str
    lo: float
    hi: float  # may be inf
    cdf: Callable[[float], float]
    pdf: Callable[[float], float]
    ppf: Callable[[np.ndarray], np.ndarray]  # inverse cdf on [0, 1)
    atom_at_hi: float = 0.0
    # characteristic width, used to scale finite-difference steps and brackets
    scale: float = field(default=1.0)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return self.ppf(rng.random(size))

    def survival_left(self, v: float) -> float:
        """P(value >= v): the left-limit survival, counting the atom at hi."""
        if v <= self.lo:
            return 1.0
        if self.hi != math.inf and v > self.hi:
            return 0.0
        if v == self.hi:
            return self.atom_at_hi
        return 1.0 - self.cdf(v)


def uniform_dist(lo: float = 0.0, hi: float = 1.0) -> ContinuousDist:
    if not lo < hi:
        raise ValueError("need lo < hi")
    width = hi - lo
    return ContinuousDist(
        name=f"uniform({lo:g},{hi:g})",
        lo=lo, hi=hi,
        cdf=lambda v: min(1.0, max(0.0, (v - lo) / width)),
        pdf=lambda v: 1.0 / width if lo <= v <= hi else 0.0,
        ppf=lambda u: lo + u * width,
        scale=width,
    )


def exponential_dist(rate: float = 1.0) -> ContinuousDist:
    if rate <= 0:
        raise ValueError("rate must be > 0")
    return ContinuousDist(
        name=f"exponential({rate:g})",
        lo=0.0, hi=math.inf,
        cdf=lambda v: 1.0 - math.exp(-rate * v) if v > 0 else 0.0,
        pdf=lambda v: rate * math.exp(-rate * v) if v >= 0 else 0.0,
        ppf=lambda u: -np.log1p(-u) / rate,
        scale=1.0 / rate,
    )


def equal_revenue_dist(M: float) -> ContinuousDist:
    """Equal-revenue distribution truncated at M: F(b) = 1 - 1/b on [1, M), atom 1/M at M.

    Every posted price r in [1, M] earns r * P(b >= r) = 1, and the virtual
    value vanishes identically on the continuous part.
    """
    if M <= 1:
        raise ValueError("M must be > 1")

    def ppf(u):
        u = np.asarray(u)
        out = 1.0 / (1.0 - u)
        return np.where(out >= M, M, out)

    return ContinuousDist(
        name=f"equal_revenue({M:g})",
        lo=1.0, hi=M,
        cdf=lambda v: 0.0 if v < 1 else (1.0 - 1.0 / v if v < M else 1.0),
        pdf=lambda v: 1.0 / v ** 2 if 1 <= v < M else 0.0,
        ppf=ppf,
        atom_at_hi=1.0 / M,
        scale=M - 1.0,
    )


def _phi_unchecked(dist: ContinuousDist, v: float) -> float:
    f = dist.pdf(v)
    if f <= 0:
        raise DomainError(f"{dist.name}: density is 0 at {v}")
    return v - (1.0 - dist.cdf(v)) / f


def virtual_value(dist: ContinuousDist, v: float) -> float:
    """phi(v) = v - (1 - F(v)) / f(v), defined on the open support with positive density."""
    if not (dist.lo < v < dist.hi):
        raise DomainError(f"{dist.name}: {v} is outside the open support ({dist.lo}, {dist.hi})")
    return _phi_unchecked(dist, v)


@dataclass(frozen=True)
class VirtualValueFn:
    """phi as a callable; regular distributions have phi monotone non-decreasing."""

    dist: ContinuousDist

    def __call__(self, v: float) -> float:
        return virtual_value(self.dist, v)

    def is_monotone_on_grid(self, points: int = 10_000) -> bool:
        hi = self.dist.hi
        if hi == math.inf:
            hi = float(self.dist.ppf(np.array(0.9999)))
        eps = (hi - self.dist.lo) * 1e-9
        grid = np.linspace(self.dist.lo + eps, hi - eps, points)
        vals = [virtual_value(self.dist, float(v)) for v in grid]
        return all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def myerson_reserve(dist: ContinuousDist, xtol: float = 1e-10) -> float:
    """The zero of the virtual value, found by bisection to xtol.

    Raises DomainError when phi has no sign change on the support (for
    example the equal-revenue family, where phi == 0).
    """
    eps = 1e-12 * max(dist.scale, 1.0)
    a = dist.lo + eps
    if dist.hi == math.inf:
        b = dist.lo + dist.scale
        phi_b = _phi_unchecked(dist, b)
        for _ in range(200):
            if phi_b > 0:
                break
            b = dist.lo + 2 * (b - dist.lo)
            phi_b = _phi_unchecked(dist, b)
    else:
        b = dist.hi - eps
    phi_a, phi_b = _phi_unchecked(dist, a), _phi_unchecked(dist, b)
    if not (phi_a < 0.0 < phi_b):
        raise DomainError(f"{dist.name}: virtual value has no sign change on the support")
    return float(sp_optimize.bisect(lambda v: _phi_unchecked(dist, v), a, b, xtol=xtol))
