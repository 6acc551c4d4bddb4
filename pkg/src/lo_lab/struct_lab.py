"""Structural tools for near-optimal step sets.

Covers dilation normalization, the variance functional, the c-irreducibility
reduction, the arrangement inequality, the greedy block lower bound for the
phase cost, and an exhaustive search for the dilation of V inside F_p that
makes most of it short.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np
from sympy import primerange

from .dist import StepSet, _as_stepset
from .errors import InvariantViolation, ValidationError
from .modfield import FieldEmbedding, _guard, centered, cost


@dataclass(frozen=True)
class ReductionTrace:
    initial: StepSet
    removed: tuple[tuple[int, int], ...]
    divisors_applied: tuple[int, ...]
    final: StepSet
    c: float
    steps_taken: int
    window_C: float

    @property
    def step_cap(self) -> int:
        return reduction_bound(self.window_C)


@dataclass(frozen=True)
class ArrangementCheck:
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class ArrangementFuzz:
    trials: int
    seed: int
    violations: int
    min_ratio: float
    sweep_cases: int
    sweep_violations: int
    sweep_min_ratio: float


@dataclass(frozen=True)
class BlockBound:
    bound: float
    blocks: int
    block_size: int
    l: float
    phase_cost: float


@dataclass(frozen=True)
class DilationFit:
    k: int
    inlier_count: int
    outlier_budget: int
    cost: float
    cost_numerator: int
    p: int
    representatives: tuple[int, ...]
    outliers: tuple[int, ...]


def normalize_dilation(V: StepSet | Sequence[int]) -> tuple[int, StepSet]:
    """Divide out the gcd of the nonzero steps."""
    V = _as_stepset(V)
    nonzero = [abs(v) for v in V.steps if v]
    if not nonzero:
        raise ValidationError("cannot normalize an all-zero step set")
    l = reduce(math.gcd, nonzero)
    return l, StepSet(tuple(v // l for v in V.steps))


def variance_fraction(V: StepSet | Sequence[int]) -> Fraction:
    V = _as_stepset(V)
    n = V.n
    if n < 2:
        raise ValidationError("variance ratio needs n >= 2")
    return Fraction(12 * sum(v * v for v in V.steps), n**3 - n)


def variance_ratio(V: StepSet | Sequence[int]) -> float:
    """12 * sum v^2 / (n^3 - n); equals 1 exactly on V0."""
    return float(variance_fraction(V))


def reduction_bound(window_C: float) -> int:
    """3 + ceil(log2 C) rounds, clamped at 3 for C <= 1."""
    return 3 + max(0, math.ceil(math.log2(window_C)))


def _smallest_divisor(values: list[int], budget: float) -> int | None:
    """Smallest d >= 2 dividing all but at most ``budget`` of ``values``,
    while keeping at least one nonzero element (else division is a no-op)."""
    nonzero = [abs(w) for w in values if w]
    if not nonzero:
        return None
    arr = np.asarray(values, dtype=np.int64)
    for d in range(2, max(nonzero) + 1):
        keep = arr % d == 0
        if np.count_nonzero(~keep) <= budget and np.any(arr[keep] != 0):
            return d
    return None


def is_c_irreducible(values: Sequence[int], c: float) -> bool:
    """Direct divisor scan over 2 <= d <= max|w|."""
    return _smallest_divisor(list(values), c * len(values)) is None


def irreducible_reduce(W: StepSet | Sequence[int], c: float, window_C: float) -> ReductionTrace:
    """Strip exceptions and divide out common divisors until no d >= 2 divides
    all but a c-fraction of the current set.

    Each round takes the smallest qualifying d.  The round count is capped at
    reduction_bound(window_C) + 1; exceeding it raises InvariantViolation,
    since it would contradict the window-halving termination argument.
    """
    W = _as_stepset(W)
    if not 0 < c < 1:
        raise ValidationError(f"c must lie in (0, 1), got {c}")
    if window_C <= 0:
        raise ValidationError("window_C must be positive")
    n = W.n
    if any(abs(w) > window_C * n for w in W.steps):
        raise ValidationError(f"elements must lie in [-{window_C}*n, {window_C}*n]")

    cap = reduction_bound(window_C) + 1
    current = list(W.steps)
    removed: list[tuple[int, int]] = []
    divisors: list[int] = []
    while current:
        d = _smallest_divisor(current, c * len(current))
        if d is None:
            break
        if len(divisors) == cap:
            raise InvariantViolation(
                f"reduction exceeded {cap} rounds (window_C={window_C}, c={c})"
            )
        step = len(divisors)
        removed.extend((w, step) for w in current if w % d)
        current = [w // d for w in current if w % d == 0]
        divisors.append(d)
    return ReductionTrace(
        initial=W,
        removed=tuple(removed),
        divisors_applied=tuple(divisors),
        final=StepSet(tuple(current)),
        c=c,
        steps_taken=len(divisors),
        window_C=window_C,
    )


def replay(trace: ReductionTrace) -> list[int]:
    """Re-run the recorded removals and divisions on ``trace.initial``."""
    current = list(trace.initial.steps)
    for step, d in enumerate(trace.divisors_applied):
        out = [w for w, s in trace.removed if s == step]
        for w in out:
            current.remove(w)
        if any(w % d for w in current):
            raise InvariantViolation(f"round {step}: d={d} does not divide the kept elements")
        current = [w // d for w in current]
    return current


def _dist_num(x: int, p: int) -> int:
    """p * ||x / p|| as an integer."""
    r = x % p
    return min(r, p - r)


def arrangement_lower_bound_check(
    p: int, xi: int, a: int, indices: Sequence[int], l: float
) -> ArrangementCheck:
    """sum_j ||(a + i_j xi)/p||^2 against (m^3/48) ||xi/p||^2."""
    m = len(indices)
    if m < 4:
        raise ValidationError(f"need at least 4 indices, got {m}")
    if l <= 0:
        raise ValidationError("l must be positive")
    dxi = _dist_num(xi, p)
    if 2 * l * dxi > p:
        raise ValidationError("precondition l * ||xi/p|| <= 1/2 fails")
    if any(b <= a_ for a_, b in zip(indices, indices[1:])) or indices[0] < 0 or indices[-1] > l:
        raise ValidationError("indices must be strictly increasing within [0, l]")
    num = sum(_dist_num(a + i * xi, p) ** 2 for i in indices)
    pp = p * p
    lhs = num / pp
    rhs = m**3 * dxi * dxi / (48 * pp)
    return ArrangementCheck(lhs=lhs, rhs=rhs, holds=lhs >= rhs - 1e-12)


def _random_tuple(rng: random.Random, primes: list[int]):
    while True:
        p = rng.choice(primes)
        xi = rng.randrange(1, p)
        lmax = p // (2 * _dist_num(xi, p))
        if lmax >= 3:
            break
    l = rng.randint(3, lmax)
    m = rng.randint(4, min(l + 1, 64))
    indices = sorted(rng.sample(range(l + 1), m))
    return p, xi, rng.randrange(p), indices, l


def arrangement_fuzz(trials: int = 100_000, seed: int = 0, sweep_pmax: int = 101) -> ArrangementFuzz:
    """Random valid tuples plus an exhaustive sweep over (p, xi, a) with the
    tightest index pattern {0, 1, 2, 3}."""
    rng = random.Random(seed)
    primes = list(primerange(11, 10_000))
    violations = 0
    min_ratio = math.inf
    for _ in range(trials):
        res = arrangement_lower_bound_check(*_random_tuple(rng, primes))
        violations += not res.holds
        min_ratio = min(min_ratio, res.lhs / res.rhs)

    cases = sweep_viol = 0
    sweep_min = math.inf
    idx = (0, 1, 2, 3)
    for p in primerange(7, sweep_pmax + 1):
        for xi in range(1, p):
            l = p // (2 * _dist_num(xi, p))
            if l < 3:
                continue
            for a in range(p):
                res = arrangement_lower_bound_check(p, xi, a, idx, l)
                cases += 1
                sweep_viol += not res.holds
                sweep_min = min(sweep_min, res.lhs / res.rhs)
    return ArrangementFuzz(
        trials=trials,
        seed=seed,
        violations=violations,
        min_ratio=min_ratio,
        sweep_cases=cases,
        sweep_violations=sweep_viol,
        sweep_min_ratio=sweep_min,
    )


def block_lower_bound(W: StepSet | Sequence[int], p: int, xi: int, window_C: float) -> BlockBound:
    """Certified lower bound for sum_w ||w xi / p||^2 from greedy short-diameter blocks.

    With l = 1/(2||xi/p||), the sorted set is cut greedily into maximal blocks
    of diameter <= l; blocks holding more than l/(8C) elements are split into
    sub-blocks of exactly floor(l/(8C)) elements, and each sub-block
    contributes the arrangement bound (m^3/48)||xi/p||^2.
    """
    W = _as_stepset(W)
    if not W.distinct:
        raise ValidationError("block bound needs distinct elements")
    n = W.n
    dxi = _dist_num(xi, p)
    t = Fraction(dxi, p)
    C = Fraction(window_C)
    if not (1 / (2 * C * n) <= t <= 1 / (64 * C)):
        raise ValidationError(f"||xi/p|| = {float(t):.6g} outside the medium regime")
    if any(abs(w) > C * n for w in W.steps):
        raise ValidationError("W must lie in [-C n, C n]")

    l = 1 / (2 * t)
    size = math.floor(l / (8 * C))
    ws = sorted(W.steps)
    blocks = 0
    start = 0
    while start < len(ws):
        end = start
        while end + 1 < len(ws) and ws[end + 1] - ws[start] <= l:
            end += 1
        count = end - start + 1
        if count > l / (8 * C):
            blocks += count // size
        start = end + 1
    per_block = Fraction(size**3, 48) * t * t
    return BlockBound(
        bound=float(blocks * per_block),
        blocks=blocks,
        block_size=size,
        l=float(l),
        phase_cost=phase_cost(W, p, xi),
    )


def _modinv_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    inv[1] = 1
    for i in range(2, p):
        inv[i] = (p - (p // i) * inv[p % i] % p) % p
    return inv


def find_dilation_fp(E: FieldEmbedding, outlier_budget: int, chunk: int = 4096) -> DilationFit:
    """Exhaustive search over k in 1..(p-1)/2 for the dilation making k^{-1} V shortest.

    Cost of k: sum of squared centered representatives of k^{-1} v_i after
    dropping the ``outlier_budget`` largest in absolute value, over p^2.
    Ties go to the smallest k.
    """
    p, n = E.p, E.n
    if not 0 <= outlier_budget < n:
        raise ValidationError(f"outlier_budget must lie in [0, {n}), got {outlier_budget}")
    _guard(p)
    inv = _modinv_table(p)
    v = np.asarray([r % p for r in E.residues], dtype=np.int64)
    keep = n - outlier_budget
    half = (p - 1) // 2
    best_k, best_num = 0, None
    for lo in range(1, half + 1, chunk):
        ks = np.arange(lo, min(lo + chunk, half + 1), dtype=np.int64)
        reps = (v[:, None] * inv[ks][None, :]) % p
        reps = np.minimum(reps, p - reps)
        sq = reps * reps
        if outlier_budget:
            sq = np.sort(sq, axis=0)[:keep]
        totals = sq.sum(axis=0)
        j = int(np.argmin(totals))
        if best_num is None or totals[j] < best_num:
            best_k, best_num = int(ks[j]), int(totals[j])
    kinv = int(inv[best_k])
    reps = tuple(centered(r * kinv, p) for r in E.residues)
    order = sorted(range(n), key=lambda i: (-abs(reps[i]), i))
    outliers = tuple(sorted(order[:outlier_budget]))
    return DilationFit(
        k=best_k,
        inlier_count=keep,
        outlier_budget=outlier_budget,
        cost=best_num / (p * p),
        cost_numerator=best_num,
        p=p,
        representatives=reps,
        outliers=outliers,
    )


def phase_cost(W: StepSet | Sequence[int], p: int, xi: int) -> float:
    """sum_w ||w xi / p||^2 for an arbitrary integer set."""
    W = _as_stepset(W)
    return cost(FieldEmbedding(p=p, residues=W.steps, source=W), xi)
