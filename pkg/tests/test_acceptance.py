"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` or ``-v`` to see the lines;
they are written outside pytest's capture so they show up in either mode.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from lo_lab import asymp, cli, dist, extremal, modfield, struct_lab
from lo_lab.dist import StepSet

from conftest import planted_reducible

SEED = 20261016


@pytest.fixture
def criterion(capsys):
    def check(number, title, limit_s, body):
        start = time.perf_counter()
        failure = None
        try:
            detail = body()
        except AssertionError as exc:
            failure, detail = exc, f"assertion failed: {exc}"
        elapsed = time.perf_counter() - start
        slow = elapsed >= limit_s
        ok = failure is None and not slow
        if slow:
            detail = f"{detail}; runtime {elapsed:.2f}s over the {limit_s}s budget"
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:>2} {title}: {detail} ({elapsed:.2f}s)")
        if failure is not None:
            raise failure
        assert not slow, detail

    return check


def test_01_erdos_sharpness(criterion):
    def body():
        for n in range(1, 17):
            assert dist.rho([1] * n).rho == Fraction(math.comb(n, n // 2), 2**n) == dist.erdos_bound(n)
        return "n = 1..16 exact"

    criterion(1, "Erdos bound is attained by all-ones", 1, body)


def test_02_erdos_bound_fuzz(criterion):
    def body():
        rng = random.Random(SEED)
        worst = Fraction(0)
        for _ in range(1000):
            n = rng.randint(1, 12)
            V = [rng.choice([-1, 1]) * rng.randint(1, 50) for _ in range(n)]
            ratio = dist.rho(V).rho / dist.erdos_bound(n)
            assert ratio <= 1, V
            worst = max(worst, ratio)
        return f"1000 multisets, 0 violations, max rho/bound = {float(worst):.4f}"

    criterion(2, "Erdos bound fuzz", 30, body)


def test_03_stanley(criterion):
    def body():
        five = extremal.stanley_verify(5, 8)
        assert five.total_sets == 6188
        assert five.rho_max == five.rho_v0 == Fraction(1, 4) and five.matches_V0
        three = extremal.stanley_verify(3, 3)
        assert three.rho_max == Fraction(1, 2) and three.matches_V0
        assert [s.steps for s in three.argmax_classes] == [(-l, 0, l) for l in (1, 2, 3)]
        assert five.violations == three.violations == 0
        return f"n=5 B=8 rho_max={five.rho_max} ({five.classes} classes); n=3 B=3 rho_max={three.rho_max}"

    criterion(3, "Stanley inequality at desk scale", 120, body)


def test_04_asymptotic_constant(criterion):
    def body():
        tab = asymp.v0_table([101, 301, 501], backend="float")
        target = 2.7639532
        gaps = [abs(r.scaled - target) for r in tab.rows]
        rel = gaps[-1] / target
        assert rel <= 0.05
        assert gaps[0] > gaps[1] > gaps[2]
        return f"scaled(501) = {tab.rows[-1].scaled:.7f}, rel gap {rel:.2e}, gaps " + ", ".join(f"{g:.2e}" for g in gaps)

    criterion(4, "rho(V0) n^1.5 approaches sqrt(24/pi)", 300, body)


def test_05_fourier_inversion(criterion):
    def body():
        rng = random.Random(SEED + 5)
        worst = 0.0
        for _ in range(200):
            n = rng.randint(1, 10)
            V = [rng.randint(-20, 20) for _ in range(n)]
            E = modfield.embed_prime(V)
            exact = dist.exact_distribution(V)
            for s, w in exact.nonzero():
                err = abs(modfield.fourier_point_mass(E, s) - float(w))
                worst = max(worst, err)
        assert worst <= 1e-9
        return f"200 sets, max error {worst:.2e}"

    criterion(5, "Fourier inversion in F_p", 60, body)


def test_06_majorant_chain(criterion):
    def body():
        rng = np.random.default_rng(SEED + 6)
        pairs = violations = 0
        for _ in range(1000):
            n = int(rng.integers(1, 13))
            V = [int(v) for v in rng.integers(-40, 41, size=n)]
            E = modfield.embed_prime(V)
            for xi in rng.integers(0, E.p, size=100):
                pairs += 1
                prod, middle, maj = modfield.majorant_chain(E, int(xi))
                if not prod <= middle * (1 + 1e-12) + 1e-15 or not middle <= maj * (1 + 1e-12):
                    violations += 1
        assert violations == 0
        return f"{pairs} pairs, 0 violations"

    criterion(6, "|prod cos(pi v xi/p)| <= prod(1 - 2||v xi/p||^2) <= exp(-2 cost)", 30, body)


@pytest.mark.parametrize("n", [101, 201])
def test_07_level_set_laws(criterion, n):
    def body():
        E = modfield.embed_prime(StepSet.v0(n))
        rep = modfield.dual_bound_check(E)
        assert rep.holds, f"|S|={rep.lhs} > {rep.rhs}"
        assert rep.t_min >= rep.t_min_required
        assert rep.t_sq_sum <= rep.t_sq_bound
        containments = 0
        for m in (Fraction(1), Fraction(n, 400)):
            for k in range(1, 6):
                assert modfield.containment_check(E, m, k).contained, (m, k)
                containments += 1
        steps = 0
        for m in (Fraction(n, 1600), Fraction(1)):
            prof = modfield.dyadic_profile(E, m)
            assert all(s.cauchy_davenport and s.contained_in_s for s in prof.steps)
            steps += len(prof.steps)
        return (
            f"n={n} p={E.p}: |S|={rep.lhs} <= {rep.rhs:.1f}, min T={rep.t_min:.1f} >= {rep.t_min_required}, "
            f"sum T^2={rep.t_sq_sum:.0f} <= {rep.t_sq_bound}, {containments} containments, {steps} dyadic steps"
        )

    criterion(7, "level-set laws", 120, body)


def test_08_tail_bound(criterion):
    def body():
        rep = asymp.sigma2_split(101)
        assert rep.sigma2 <= 101**-3
        return f"tail majorant {rep.sigma2:.3e} <= n^-3 = {101**-3:.3e}"

    criterion(8, "tail regimes are negligible at n=101", 60, body)


def test_09_arrangement(criterion):
    def body():
        res = struct_lab.arrangement_fuzz(trials=100_000, seed=SEED, sweep_pmax=101)
        assert res.violations == 0 and res.sweep_violations == 0
        return (
            f"{res.trials} random tuples (min ratio {res.min_ratio:.3f}), "
            f"{res.sweep_cases} exhaustive cases with p <= 101, 0 violations"
        )

    criterion(9, "arrangement inequality", 60, body)


def _block_minimum(n):
    W = StepSet.v0(n)
    p = modfield.embed_prime(W).p
    lo, hi = math.ceil(p / n), p // 32  # medium regime for window_C = 1/2
    best = math.inf
    for xi in np.linspace(lo, hi, 200).round().astype(int):
        res = struct_lab.block_lower_bound(W, p, int(xi), 0.5)
        assert res.bound <= res.phase_cost + 1e-12, (n, xi)
        best = min(best, res.bound / n)
    return best


def test_10_block_bound(criterion):
    def body():
        mins = {n: _block_minimum(n) for n in (101, 201)}
        again = {n: _block_minimum(n) for n in (101, 201)}
        assert mins == again
        assert all(v > 0 for v in mins.values())
        return "min bound/n " + ", ".join(f"n={n}: {v:.4e}" for n, v in mins.items())

    criterion(10, "block bound is sound", 120, body)


def test_11_reduction_termination(criterion):
    def body():
        rng = random.Random(SEED + 11)
        worst = -math.inf
        for _ in range(500):
            steps, c, C = planted_reducible(rng)
            t = struct_lab.irreducible_reduce(steps, c, C)
            assert t.steps_taken <= struct_lab.reduction_bound(C)
            assert struct_lab.is_c_irreducible(t.final.steps, c)
            assert struct_lab.replay(t) == list(t.final.steps)
            worst = max(worst, t.steps_taken - struct_lab.reduction_bound(C))
        return f"500 planted sets, max (rounds - bound) = {worst}"

    criterion(11, "divisor reduction terminates", 30, body)


def test_12_stability_report(criterion, capsys):
    def body():
        rep = extremal.stability_scan(5, 8, 0.15)
        top = rep.rows[0]
        assert top.is_dilate_of_V0 and top.variance_ratio == 1.0
        argv = ["stability", "--n", "5", "--B", "8", "--epsilon", "0.15"]
        outputs = []
        for threads in ("1", "2", "1"):
            assert cli.run(argv + ["--threads", threads]) == 0
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1] == outputs[2]
        worst = max(r.variance_ratio for r in rep.rows)
        return f"top row {top.steps.steps}, {len(rep.rows)} rows, max variance ratio {worst:.3f}, byte-identical"

    criterion(12, "stability report", 120, body)


def test_13_monte_carlo(criterion):
    def body():
        rng = random.Random(SEED + 13)
        worst = 0.0
        for i in range(20):
            n = rng.randint(1, 8)
            V = [rng.randint(-10, 10) for _ in range(n)]
            exact = float(dist.rho(V).rho)
            mc = dist.monte_carlo_rho(V, samples=100_000, seed=SEED + i)
            z = abs(mc.rho_hat - exact) / mc.stderr if mc.stderr > 0 else (0.0 if mc.rho_hat == exact else math.inf)
            assert z <= 4, (V, mc, exact)
            worst = max(worst, z)
        return f"20 sets, max |z| = {worst:.2f}"

    criterion(13, "Monte Carlo agrees with exact", 60, body)
