"""Prime-field embedding of a step set and the Fourier toolkit built on it.

Frequencies are the integers 0 .. p-1.  The quadratic phase cost

    cost(xi) = sum_i ||v_i * xi / p||**2

is computed in exact integer arithmetic as a numerator over p**2; all level
set membership tests compare numerators, so the inclusive threshold is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np
from sympy import isprime, nextprime

from .dist import StepSet, _as_stepset, exact_distribution
from .errors import CapacityError, InvariantViolation, NotApplicable, ValidationError

MAX_PRIME = 1 << 26
DOUBLING_GROWTH = 2.1


@dataclass(frozen=True)
class FieldEmbedding:
    p: int
    residues: tuple[int, ...]
    source: StepSet

    @property
    def n(self) -> int:
        return len(self.residues)


@dataclass(frozen=True)
class LevelSet:
    m: Fraction | float
    members: tuple[int, ...]
    p: int

    def __len__(self):
        return len(self.members)

    def __contains__(self, xi):
        return xi in set(self.members)


@dataclass(frozen=True)
class LevelWitness:
    m: int
    size: int
    lhs: float
    rhs: float


@dataclass(frozen=True)
class DualBoundReport:
    n: int
    p: int
    m: Fraction
    lhs: int
    rhs: float
    holds: bool
    t_min: float
    t_max: float
    t_min_required: float
    t_sq_sum: float
    t_sq_bound: int


@dataclass(frozen=True)
class DyadicStep:
    i: int
    size: int
    contained_in_s: bool
    cauchy_davenport: bool


@dataclass(frozen=True)
class DyadicProfile:
    m: Fraction | float
    growth: float
    l: int
    i0: int
    steps: tuple[DyadicStep, ...]


@dataclass(frozen=True)
class ContainmentCheck:
    k: int
    m: Fraction | float
    sumset_size: int
    target_size: int
    contained: bool


def centered(x: int, p: int) -> int:
    """Representative of x mod p in (-p/2, p/2]."""
    r = x % p
    return r - p if r > p // 2 else r


def embed(V: StepSet | Iterable[int], p: int) -> FieldEmbedding:
    V = _as_stepset(V)
    if not isprime(p) or p < 3:
        raise ValidationError(f"p={p} is not an odd prime")
    if p <= 2 * V.abs_sum:
        raise ValidationError(f"p={p} must exceed 2*sum|v|={2 * V.abs_sum}")
    return FieldEmbedding(p=p, residues=tuple(centered(v, p) for v in V.steps), source=V)


def embed_prime(V: StepSet | Iterable[int]) -> FieldEmbedding:
    """Embed into F_p with p the smallest prime above 2*sum|v| + 1 (at least 3)."""
    V = _as_stepset(V)
    p = max(3, int(nextprime(2 * V.abs_sum + 1)))
    return embed(V, p)


def _guard(p: int) -> None:
    if p > MAX_PRIME:
        raise CapacityError(f"p={p} exceeds the scan capacity {MAX_PRIME}")


def _frac(m) -> Fraction:
    if m < 0:
        raise ValidationError(f"threshold must be nonnegative, got {m}")
    return Fraction(m)


def _threshold_numerator(m, p: int) -> int:
    return math.floor(_frac(m) * p * p)


@lru_cache(maxsize=16)
def _cost_numerators(p: int, residues: tuple[int, ...]) -> np.ndarray:
    """p**2 * cost(xi) for every xi in 0..p-1, as exact int64."""
    _guard(p)
    half = p // 2
    if len(residues) * half * half >= 1 << 62:
        raise CapacityError("cost numerators would overflow int64")
    xi = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for r in residues:
        x = (r % p) * xi % p
        d = np.minimum(x, p - x)
        acc += d * d
    acc.flags.writeable = False
    return acc


def cost_numerators(E: FieldEmbedding) -> np.ndarray:
    return _cost_numerators(E.p, E.residues)


def cost(E: FieldEmbedding, xi: int) -> float:
    """sum_i ||v_i xi / p||^2 at a single frequency."""
    p = E.p
    num = 0
    for r in E.residues:
        d = (r * xi) % p
        d = min(d, p - d)
        num += d * d
    return num / (p * p)


def fourier_point_mass(E: FieldEmbedding, a: int) -> float:
    """P(S = a) recovered through the inversion sum over all of F_p."""
    p = E.p
    _guard(p)
    xi = np.arange(p, dtype=np.int64)
    prod = np.ones(p)
    scale = 2.0 * math.pi / p
    for r in E.residues:
        prod *= np.cos(scale * ((r % p) * xi % p))
    phase = np.cos(scale * ((-a % p) * xi % p))
    return float(np.dot(prod, phase) / p)


@dataclass(frozen=True)
class FourierRow:
    a: int
    fourier: float
    exact: Fraction
    abs_err: float


@dataclass(frozen=True)
class FourierReport:
    p: int
    rows: tuple[FourierRow, ...]
    max_abs_err: float


def fourier_check(E: FieldEmbedding, targets: Iterable[int] | None = None) -> FourierReport:
    """Inversion-sum point masses against the exact law, by default on the whole support."""
    law = exact_distribution(E.source)
    if targets is None:
        targets = law.support
    rows = []
    for a in targets:
        exact = law.prob(a)
        f = fourier_point_mass(E, a)
        rows.append(FourierRow(a=a, fourier=f, exact=exact, abs_err=abs(f - float(exact))))
    return FourierReport(p=E.p, rows=tuple(rows), max_abs_err=max((r.abs_err for r in rows), default=0.0))


def cosine_product(E: FieldEmbedding, xi: int, halved: bool = False) -> float:
    """prod_i cos(2 pi v_i xi / p), or cos(pi v_i xi / p) when halved."""
    p = E.p
    if not 0 <= xi < p:
        raise ValidationError(f"xi must lie in [0, {p}), got {xi}")
    out = 1.0
    for v in E.residues:
        if halved:
            out *= math.cos(math.pi * ((v * xi) % (2 * p)) / p)
        else:
            out *= math.cos(2.0 * math.pi * ((v * xi) % p) / p)
    return out


def majorant(E: FieldEmbedding, xi: int) -> float:
    """exp(-2 cost(xi)), an upper bound for |cosine_product(E, xi, halved=True)|."""
    if not 0 <= xi < E.p:
        raise ValidationError(f"xi must lie in [0, {E.p}), got {xi}")
    return math.exp(-2.0 * cost(E, xi))


def majorant_chain(E: FieldEmbedding, xi: int) -> tuple[float, float, float]:
    """(|prod cos(pi v xi/p)|, prod (1 - 2||v xi/p||^2), exp(-2 cost)) at one frequency."""
    p = E.p
    middle = 1.0
    for v in E.residues:
        d = (v * xi) % p
        d = min(d, p - d)
        middle *= 1.0 - 2.0 * (d / p) ** 2
    return abs(cosine_product(E, xi, halved=True)), middle, majorant(E, xi)


def level_set(E: FieldEmbedding, m) -> LevelSet:
    """All xi with cost(xi) <= m (inclusive), by a full scan of F_p."""
    thr = _threshold_numerator(m, E.p)
    members = np.flatnonzero(cost_numerators(E) <= thr)
    return LevelSet(m=m, members=tuple(int(x) for x in members), p=E.p)


def level_set_size(E: FieldEmbedding, m) -> int:
    return int(np.count_nonzero(cost_numerators(E) <= _threshold_numerator(m, E.p)))


def level_witness(E: FieldEmbedding, rho_value) -> tuple[LevelWitness, LevelSet]:
    """Smallest integer m >= 1 with |S_m| * exp(2 - m) >= rho * p."""
    if not 0 < rho_value <= 1:
        raise ValidationError(f"rho must lie in (0, 1], got {rho_value}")
    ordered = np.sort(cost_numerators(E))
    p = E.p
    target = float(rho_value) * p
    for m in range(1, max(E.n, 1) + 1):
        size = int(np.searchsorted(ordered, m * p * p, side="right"))
        lhs = size * math.exp(2 - m)
        if lhs >= target:
            return LevelWitness(m=m, size=size, lhs=lhs, rhs=target), level_set(E, m)
    raise InvariantViolation(
        f"no level set with m <= {E.n} satisfies |S_m| exp(2-m) >= rho p (rho={rho_value})"
    )


def t_values(E: FieldEmbedding) -> np.ndarray:
    """T_a = sum_{v in V} cos(2 pi a v / p) for every a in F_p."""
    p = E.p
    _guard(p)
    a = np.arange(p, dtype=np.int64)
    out = np.zeros(p)
    scale = 2.0 * math.pi / p
    for v in E.residues:
        out += np.cos(scale * ((v % p) * a % p))
    return out


def dual_bound_check(E: FieldEmbedding) -> DualBoundReport:
    n, p = E.n, E.p
    if n < 100:
        raise NotApplicable(f"dual bound needs n >= 100, got n={n}")
    m = Fraction(n, 100)
    members = np.asarray(level_set(E, m).members, dtype=np.int64)
    t = t_values(E)
    on_level = t[members]
    lhs = int(members.size)
    rhs = 8.0 * p / n
    return DualBoundReport(
        n=n,
        p=p,
        m=m,
        lhs=lhs,
        rhs=rhs,
        holds=lhs <= rhs,
        t_min=float(on_level.min()),
        t_max=float(on_level.max()),
        t_min_required=n / 2,
        t_sq_sum=float(math.fsum(t * t)),
        t_sq_bound=2 * p * n,
    )


def _as_array(A, p: int) -> np.ndarray:
    arr = np.unique(np.asarray(sorted(A), dtype=np.int64) % p)
    if arr.size == 0:
        raise ValidationError("sumset operands must be nonempty")
    return arr


def _sumset_array(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    if A.size > B.size:
        A, B = B, A
    table = np.zeros(p, dtype=bool)
    for a in A:
        table[(B + a) % p] = True
    return np.flatnonzero(table)


def sumset(A: Iterable[int], B: Iterable[int], p: int) -> frozenset[int]:
    """{a + b mod p}."""
    _guard(p)
    return frozenset(int(x) for x in _sumset_array(_as_array(A, p), _as_array(B, p), p))


def iterated_sumset(A: Iterable[int], k: int, p: int) -> frozenset[int]:
    """The k-fold sumset A + ... + A (k >= 1)."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    base = _as_array(A, p)
    acc = base
    for _ in range(k - 1):
        acc = _sumset_array(acc, base, p)
    return frozenset(int(x) for x in acc)


def containment_check(E: FieldEmbedding, m, k: int) -> ContainmentCheck:
    """Whether the k-fold sumset of S_m lies inside S_{k^2 m}."""
    S = level_set(E, m)
    kS = iterated_sumset(S.members, k, E.p)
    target = level_set(E, _frac(m) * k * k)
    return ContainmentCheck(
        k=k,
        m=m,
        sumset_size=len(kS),
        target_size=len(target),
        contained=kS <= set(target.members),
    )


def dyadic_depth(n: int, m) -> int:
    """Largest l >= 0 with 4**l * m <= n / 100."""
    m = _frac(m)
    limit = Fraction(n, 100)
    if m == 0:
        raise ValidationError("dyadic depth is unbounded for m = 0")
    l = 0
    while 4 ** (l + 1) * m <= limit:
        l += 1
    return l


def dyadic_profile(E: FieldEmbedding, m, growth: float = DOUBLING_GROWTH) -> DyadicProfile:
    """Sizes of S_m, 2S_m, 4S_m, ... up to 2**l S_m, with containment and
    Cauchy-Davenport checks at every doubling.

    ``i0`` is the first doubling whose size falls below ``growth`` times the
    previous one, or l + 1 if growth never stalls.
    """
    p = E.p
    l = dyadic_depth(E.n, m) if m > 0 else 0
    A = np.asarray(level_set(E, m).members, dtype=np.int64)
    steps = [DyadicStep(i=0, size=int(A.size), contained_in_s=True, cauchy_davenport=True)]
    i0 = None
    costs = cost_numerators(E)
    for i in range(1, l + 1):
        prev = A
        A = _sumset_array(prev, prev, p)
        thr = _threshold_numerator(_frac(m) * 4 ** i, p)
        contained = bool(np.all(costs[A] <= thr))
        cd = A.size >= min(p, 2 * prev.size - 1)
        steps.append(DyadicStep(i=i, size=int(A.size), contained_in_s=contained, cauchy_davenport=cd))
        if i0 is None and A.size < growth * prev.size:
            i0 = i
    return DyadicProfile(m=m, growth=growth, l=l, i0=l + 1 if i0 is None else i0, steps=tuple(steps))
