"""Asymptotics of rho(V0): the Gaussian main term and the tail majorant by regime."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import dist
from .dist import StepSet
from .errors import ValidationError
from .modfield import cost_numerators, embed_prime


@dataclass(frozen=True)
class RegimeReport:
    n: int
    p: int
    cutoff: float
    sigma1: float
    sigma2_small: float
    sigma2_medium: float
    sigma2_large: float
    large_min_cost: float
    inversion_2pi: float
    inversion_pi: float

    @property
    def sigma2(self) -> float:
        return self.sigma2_small + self.sigma2_medium + self.sigma2_large


@dataclass(frozen=True)
class V0Row:
    n: int
    rho: Fraction | float
    scaled: float
    prediction: float
    abs_gap: float


@dataclass(frozen=True)
class V0Table:
    backend: str
    rows: tuple[V0Row, ...]
    gap_decreasing: bool


def c0_constant() -> float:
    return math.sqrt(24.0 / math.pi)


def _check_odd(n: int, least: int = 3) -> None:
    if n < least or n % 2 == 0:
        raise ValidationError(f"n must be odd and >= {least}, got {n}")


def sigma1_gaussian(n: int) -> float:
    """Gaussian main term 4*sqrt(3) / sqrt(2 pi (n^3 - n)).

    This is twice the normal density at 0 with variance sum_{V0} i^2 =
    (n^3 - n)/12; the factor 2 is the lattice spacing of S, which only
    takes even values for V0.
    """
    _check_odd(n)
    return 4.0 * math.sqrt(3.0) / math.sqrt(2.0 * math.pi * (n**3 - n))


def sigma2_split(n: int) -> RegimeReport:
    """Majorant sums (1/p) sum exp(-2 cost(xi)) over the three tail regimes of ||xi/p||.

    Regimes are [cutoff, 1/n), [1/n, 1/4) and [1/4, 1/2] with
    cutoff = log(n)^2 / n^{3/2}; sigma1 is the main-term sum of
    prod |cos(pi i xi / p)| over ||xi/p|| <= cutoff.
    """
    _check_odd(n)
    V = StepSet.v0(n)
    E = embed_prime(V)
    p = E.p
    costs = cost_numerators(E) / float(p * p)
    xi = np.arange(p, dtype=np.int64)
    dist_to_zero = np.minimum(xi, p - xi) / p
    cutoff = math.log(n) ** 2 / n**1.5

    # Centered xi keeps cos(pi i xi / p) well defined; the product over the
    # symmetric V0 makes the pi and 2 pi forms of the inversion sum coincide.
    centered_xi = np.where(xi > p // 2, xi - p, xi)
    prod_pi = np.ones(p)
    prod_2pi = np.ones(p)
    for i in V.steps:
        prod_pi *= np.cos(math.pi * i * centered_xi / p)
        prod_2pi *= np.cos(2.0 * math.pi * ((i % p) * xi % p) / p)

    main = dist_to_zero <= cutoff
    small = (~main) & (dist_to_zero < 1.0 / n)
    medium = (dist_to_zero >= 1.0 / n) & (dist_to_zero < 0.25)
    large = dist_to_zero >= 0.25
    # Regimes overlap `main` only when cutoff >= 1/n (tiny n); keep them disjoint.
    medium &= ~main
    large &= ~main

    maj = np.exp(-2.0 * costs)
    return RegimeReport(
        n=n,
        p=p,
        cutoff=cutoff,
        sigma1=float(np.abs(prod_pi[main]).sum() / p),
        sigma2_small=float(maj[small].sum() / p),
        sigma2_medium=float(maj[medium].sum() / p),
        sigma2_large=float(maj[large].sum() / p),
        large_min_cost=float(costs[large].min()) if large.any() else math.inf,
        inversion_2pi=float(prod_2pi.sum() / p),
        inversion_pi=float(prod_pi.sum() / p),
    )


def v0_table(n_values: Sequence[int], backend: str = "exact") -> V0Table:
    """rho(V0) against the n^{-3/2} scaling for each listed n."""
    c0 = c0_constant()
    rows = []
    for n in n_values:
        _check_odd(n, least=1)
        r = dist.rho(StepSet.v0(n), backend=backend).rho
        scaled = float(r) * n**1.5
        prediction = sigma1_gaussian(n) if n >= 3 else math.nan
        rows.append(V0Row(n=n, rho=r, scaled=scaled, prediction=prediction, abs_gap=abs(scaled - c0)))
    gaps = [row.abs_gap for row in rows]
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    return V0Table(backend=backend, rows=tuple(rows), gap_decreasing=decreasing)
