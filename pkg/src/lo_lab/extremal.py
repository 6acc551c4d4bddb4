"""Exhaustive search over distinct-integer step sets in a window [-B, B].

Sets are merged only under the global sign flip V -> -V, which preserves the
law of S; translations are kept apart because they change it.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .dist import StepSet
from .errors import CapacityError, ValidationError
from .struct_lab import normalize_dilation, variance_ratio

SCHEMA_VERSION = 1
ENUMERATION_CAP = 10**7


@dataclass(frozen=True)
class StanleyResult:
    n: int
    B: int
    rho_max: Fraction
    rho_v0: Fraction
    argmax_classes: tuple[StepSet, ...]
    matches_V0: bool
    violations: int
    classes: int
    total_sets: int


@dataclass(frozen=True)
class ScanRow:
    steps: StepSet
    rho: Fraction
    variance_ratio: float
    is_dilate_of_V0: bool


@dataclass(frozen=True)
class ScanReport:
    n: int
    window_B: int
    epsilon: float
    rows: tuple[ScanRow, ...]
    rho_max: Fraction
    total_sets: int
    classes: int
    maximizer_count: int
    top_is_dilate_of_V0: bool
    maximizers_all_dilates: bool
    schema_version: int = SCHEMA_VERSION


def _check_window(n: int, B: int, cap: int) -> int:
    if n < 1:
        raise ValidationError("n must be >= 1")
    if 2 * B + 1 < n:
        raise ValidationError(f"window [-{B}, {B}] holds fewer than n={n} integers")
    total = math.comb(2 * B + 1, n)
    if total > cap:
        raise CapacityError(f"C({2 * B + 1}, {n}) = {total} subsets exceeds the cap {cap}")
    return total


def canonical(steps) -> tuple[int, ...]:
    """Lexicographically larger of sorted(V) and sorted(-V)."""
    s = tuple(sorted(steps))
    return max(s, tuple(sorted(-v for v in s)))


def order_key(steps) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Tie order among classes: sorted |v| pattern first, then the canonical tuple."""
    s = tuple(steps)
    return tuple(sorted(abs(v) for v in s)), s


def sign_class_size(steps) -> int:
    s = tuple(sorted(steps))
    return 1 if s == tuple(sorted(-v for v in s)) else 2


def _canonical_tuples(n: int, B: int, first: int | None = None) -> Iterator[tuple[int, ...]]:
    if first is None:
        combos = itertools.combinations(range(-B, B + 1), n)
    else:
        combos = ((first,) + rest for rest in itertools.combinations(range(first + 1, B + 1), n - 1))
    for c in combos:
        if c >= tuple(sorted(-v for v in c)):
            yield c


def enumerate_canonical(n: int, B: int, cap: int = ENUMERATION_CAP) -> Iterator[StepSet]:
    """One representative per sign-flip class of n-subsets of [-B, B]."""
    _check_window(n, B, cap)
    for c in _canonical_tuples(n, B):
        yield StepSet(c)


def _max_count(steps: tuple[int, ...]) -> int:
    total = sum(abs(v) for v in steps)
    acc = np.zeros(2 * total + 1, dtype=np.int64)
    acc[total] = 1
    reach = 0
    for v in steps:
        a = abs(v)
        if a == 0:
            acc *= 2
            continue
        lo, hi = total - reach, total + reach + 1
        live = acc[lo:hi].copy()
        acc[lo:hi] = 0
        acc[lo - a:hi - a] += live
        acc[lo + a:hi + a] += live
        reach += a
    return int(acc.max())


def _partition_counts(args) -> list[tuple[tuple[int, ...], int]]:
    n, B, first = args
    return [(c, _max_count(c)) for c in _canonical_tuples(n, B, first)]


def _scan(n: int, B: int, workers: int) -> list[tuple[tuple[int, ...], int]]:
    """(canonical tuple, max sign-vector count) for every class, in
    lexicographic order regardless of worker count."""
    parts = [(n, B, first) for first in range(-B, B + 1)]
    if workers <= 1:
        chunks = map(_partition_counts, parts)
        return [item for chunk in chunks for item in chunk]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunks = list(pool.map(_partition_counts, parts))
    return [item for chunk in chunks for item in chunk]


def _check_odd(n: int, B: int) -> None:
    if n % 2 == 0 or n < 1:
        raise ValidationError(f"n must be odd, got {n}")
    if B < n // 2:
        raise ValidationError(f"window B={B} must be at least n//2={n // 2}")


def stanley_verify(n: int, B: int, cap: int = ENUMERATION_CAP, workers: int = 1) -> StanleyResult:
    """Exhaustive maximum of rho over distinct n-subsets of [-B, B], compared to rho(V0)."""
    _check_odd(n, B)
    total = _check_window(n, B, cap)
    scanned = _scan(n, B, workers)
    denom = 1 << n
    v0_count = _max_count(StepSet.v0(n).steps)
    top = max(c for _, c in scanned)
    argmax = tuple(StepSet(s) for s in sorted((s for s, c in scanned if c == top), key=order_key))
    return StanleyResult(
        n=n,
        B=B,
        rho_max=Fraction(top, denom),
        rho_v0=Fraction(v0_count, denom),
        argmax_classes=argmax,
        matches_V0=top == v0_count,
        violations=sum(c > v0_count for _, c in scanned),
        classes=len(scanned),
        total_sets=total,
    )


def is_dilate_of_v0(steps) -> bool:
    n = len(steps)
    if n % 2 == 0 or not any(steps):
        return False
    l, W = normalize_dilation(steps)
    return sorted(W.steps) == list(StepSet.v0(n).steps)


def stability_scan(
    n: int, B: int, epsilon: float, cap: int = ENUMERATION_CAP, workers: int = 1
) -> ScanReport:
    """Every class with rho >= (1 - epsilon) * rho_max, with its normalized variance ratio."""
    _check_odd(n, B)
    if not 0 <= epsilon < 1:
        raise ValidationError(f"epsilon must lie in [0, 1), got {epsilon}")
    total = _check_window(n, B, cap)
    scanned = _scan(n, B, workers)
    denom = 1 << n
    top = max(c for _, c in scanned)
    floor = (1 - Fraction(epsilon)) * top
    kept = sorted(((s, c) for s, c in scanned if c >= floor), key=lambda sc: (-sc[1], order_key(sc[0])))
    rows = []
    for s, c in kept:
        ratio = variance_ratio(normalize_dilation(s)[1]) if n >= 2 and any(s) else math.nan
        rows.append(
            ScanRow(steps=StepSet(s), rho=Fraction(c, denom), variance_ratio=ratio, is_dilate_of_V0=is_dilate_of_v0(s))
        )
    maximizers = [r for r in rows if r.rho == Fraction(top, denom)]
    return ScanReport(
        n=n,
        window_B=B,
        epsilon=epsilon,
        rows=tuple(rows),
        rho_max=Fraction(top, denom),
        total_sets=total,
        classes=len(scanned),
        maximizer_count=len(maximizers),
        top_is_dilate_of_V0=rows[0].is_dilate_of_V0,
        maximizers_all_dilates=all(r.is_dilate_of_V0 for r in maximizers),
    )
