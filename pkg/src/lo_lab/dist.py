"""Distribution of the signed sum S = sum_i eta_i * v_i with iid uniform signs.

Two backends share one convolution loop:

* ``"exact"`` keeps integer counts of sign vectors (weight = count / 2**n),
  stored as int64 while that cannot overflow and as Python ints otherwise.
* ``"float"`` keeps probabilities directly and is meant for large n where
  only a handful of significant digits matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, ValidationError

BACKENDS = ("exact", "float")

# Widest support (2 * sum|v| + 1) each backend accepts.
MAX_EXACT_WIDTH = 1 << 24
MAX_FLOAT_WIDTH = 1 << 27

_INT64_SAFE_N = 62


@dataclass(frozen=True)
class StepSet:
    """The multiset of integer steps v_1, ..., v_n, in the order given."""

    steps: tuple[int, ...]

    def __post_init__(self):
        steps = tuple(int(v) for v in self.steps)
        if not steps:
            raise ValidationError("a step set needs at least one element")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def of(cls, values: Iterable[int]) -> "StepSet":
        return cls(tuple(values))

    @classmethod
    def v0(cls, n: int) -> "StepSet":
        """The symmetric interval {-n//2, ..., n//2} (n odd)."""
        if n < 1 or n % 2 == 0:
            raise ValidationError(f"V0 is defined for odd n >= 1, got n={n}")
        h = n // 2
        return cls(tuple(range(-h, h + 1)))

    @classmethod
    def parse(cls, text: str) -> "StepSet":
        try:
            values = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
        except ValueError as exc:
            raise ValidationError(f"cannot parse step set {text!r}") from exc
        return cls(tuple(values))

    @property
    def n(self) -> int:
        return len(self.steps)

    @property
    def distinct(self) -> bool:
        return len(set(self.steps)) == len(self.steps)

    @property
    def abs_sum(self) -> int:
        return sum(abs(v) for v in self.steps)

    def scaled(self, factor: int) -> "StepSet":
        return StepSet(tuple(factor * v for v in self.steps))

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True, eq=False)
class SumDistribution:
    """P(S = offset + t) for t = 0 .. len(values) - 1.

    For the exact backend ``values`` holds sign-vector counts and
    ``denominator`` is 2**n; for the float backend ``values`` holds
    probabilities and ``denominator`` is 1.
    """

    offset: int
    values: np.ndarray
    backend: str
    denominator: int = 1
    _weights: list = field(default=None, init=False, repr=False)

    @property
    def support(self) -> range:
        return range(self.offset, self.offset + len(self.values))

    @property
    def weights(self) -> list:
        if self._weights is None:
            if self.backend == "exact":
                w = [Fraction(int(c), self.denominator) for c in self.values]
            else:
                w = [float(x) for x in self.values]
            object.__setattr__(self, "_weights", w)
        return self._weights

    @property
    def total_mass(self):
        if self.backend == "exact":
            return Fraction(sum(int(c) for c in self.values), self.denominator)
        return float(math.fsum(self.values))

    def prob(self, s: int):
        t = s - self.offset
        if 0 <= t < len(self.values):
            return self.weights[t]
        return Fraction(0) if self.backend == "exact" else 0.0

    def nonzero(self) -> list[tuple[int, object]]:
        return [(self.offset + t, w) for t, w in enumerate(self.weights) if w]

    def __eq__(self, other):
        if not isinstance(other, SumDistribution):
            return NotImplemented
        return (
            self.backend == other.backend
            and self.offset == other.offset
            and self.weights == other.weights
        )


@dataclass(frozen=True)
class RhoResult:
    rho: Fraction | float
    argmax_values: tuple[int, ...]


@dataclass(frozen=True)
class MonteCarloResult:
    rho_hat: float
    stderr: float
    samples: int
    seed: int


def _check_backend(backend: str) -> None:
    if backend not in BACKENDS:
        raise ValidationError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def _as_stepset(V) -> StepSet:
    return V if isinstance(V, StepSet) else StepSet.of(V)


def exact_distribution(V: StepSet | Sequence[int]) -> SumDistribution:
    """Exact law of S by iterated two-point convolution."""
    return distribution(V, backend="exact")


def distribution(V: StepSet | Sequence[int], backend: str = "exact") -> SumDistribution:
    _check_backend(backend)
    V = _as_stepset(V)
    total = V.abs_sum
    width = 2 * total + 1
    cap = MAX_EXACT_WIDTH if backend == "exact" else MAX_FLOAT_WIDTH
    if width > cap:
        raise CapacityError(
            f"support width {width} exceeds the {backend} backend capacity {cap}"
        )

    if backend == "exact":
        dtype = np.int64 if V.n <= _INT64_SAFE_N else object
        acc = np.zeros(width, dtype=dtype)
        acc[total] = 1
    else:
        acc = np.zeros(width, dtype=np.float64)
        acc[total] = 1.0

    # acc is indexed by s + total; the live window is [total - reach, total + reach].
    reach = 0
    for v in V.steps:
        a = abs(v)
        if a == 0:
            if backend == "exact":
                acc = acc * 2
            continue
        lo, hi = total - reach, total + reach + 1
        live = acc[lo:hi].copy()
        acc[lo:hi] = 0
        if backend == "exact":
            acc[lo - a:hi - a] += live
            acc[lo + a:hi + a] += live
        else:
            half = 0.5 * live
            acc[lo - a:hi - a] += half
            acc[lo + a:hi + a] += half
        reach += a

    if backend == "float":
        mass = math.fsum(acc)
        assert abs(mass - 1.0) <= 1e-12, f"mass drift {mass - 1.0:.3e}"
        return SumDistribution(offset=-total, values=acc, backend="float")
    return SumDistribution(offset=-total, values=acc, backend="exact", denominator=1 << V.n)


def rho(V: StepSet | Sequence[int], backend: str = "exact") -> RhoResult:
    """Largest point mass of S and every point attaining it."""
    d = distribution(V, backend=backend)
    vals = d.values
    if backend == "exact":
        if vals.dtype == object:
            top = max(vals)
            idx = [t for t in range(len(vals)) if vals[t] == top]
        else:
            top = vals.max()
            idx = np.flatnonzero(vals == top).tolist()
        value = Fraction(int(top), d.denominator)
    else:
        top = float(vals.max())
        idx = np.flatnonzero(vals >= top * (1.0 - 1e-12)).tolist()
        value = top
    return RhoResult(rho=value, argmax_values=tuple(d.offset + t for t in idx))


def rho_at(V: StepSet | Sequence[int], target: int, backend: str = "exact"):
    """P(S = target); zero outside the support."""
    return distribution(V, backend=backend).prob(target)


def erdos_bound(n: int) -> Fraction:
    """binom(n, n//2) / 2**n, the sharp bound for nonzero steps."""
    if n < 1:
        raise ValidationError(f"n must be positive, got {n}")
    return Fraction(math.comb(n, n // 2), 1 << n)


def monte_carlo_rho(
    V: StepSet | Sequence[int], samples: int, seed: int, chunk: int = 65536
) -> MonteCarloResult:
    """Empirical max point mass from iid sign vectors, with its binomial standard error."""
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    V = _as_stepset(V)
    steps = np.asarray(V.steps, dtype=np.int64)
    total = V.abs_sum
    rng = np.random.default_rng(seed)
    counts = np.zeros(2 * total + 1, dtype=np.int64)
    done = 0
    while done < samples:
        size = min(chunk, samples - done)
        signs = rng.integers(0, 2, size=(size, V.n), dtype=np.int8) * 2 - 1
        sums = signs.astype(np.int64) @ steps
        counts += np.bincount(sums + total, minlength=counts.size)
        done += size
    p = counts.max() / samples
    return MonteCarloResult(
        rho_hat=float(p),
        stderr=math.sqrt(p * (1.0 - p) / samples),
        samples=samples,
        seed=seed,
    )
