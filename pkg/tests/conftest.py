import itertools
import random
from collections import Counter
from fractions import Fraction

import pytest


def brute_force_law(steps):
    """P(S = s) by enumerating all 2**n sign vectors."""
    n = len(steps)
    counts = Counter(
        sum(e * v for e, v in zip(signs, steps)) for signs in itertools.product((-1, 1), repeat=n)
    )
    return {s: Fraction(c, 2**n) for s, c in counts.items()}


def random_steps(rng, n_max=10, v_max=20, nonzero=False, distinct=False):
    n = rng.randint(1, n_max)
    pool = [v for v in range(-v_max, v_max + 1) if v or not nonzero]
    if distinct:
        n = min(n, len(pool))
        return rng.sample(pool, n)
    return [rng.choice(pool) for _ in range(n)]


@pytest.fixture
def rng():
    return random.Random(20261016)


def planted_reducible(rng):
    """A distinct set in [-C n, C n] built as D * base plus a few exceptions.

    Returns (steps, c, window_C) with c small enough that the window-halving
    argument bounds the reduction rounds by 3 + ceil(log2 C).
    """
    from lo_lab.struct_lab import reduction_bound

    C = rng.choice([2, 4, 8, 16, 32])
    c = 1 / (4 * reduction_bound(C))
    n = rng.randint(24, 80)
    e = rng.randint(0, int(c * n))
    D = 1
    while True:
        d = rng.choice([2, 2, 3, 5, 7])
        if D * d > C:
            break
        D *= d
    reach = C * n // D
    base = rng.sample(range(-reach, reach + 1), n - e)
    steps = {D * b for b in base}
    while len(steps) < n:
        w = rng.randint(-C * n, C * n)
        if D == 1 or w % D:
            steps.add(w)
    steps = list(steps)
    rng.shuffle(steps)
    return steps, c, C
