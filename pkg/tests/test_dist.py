from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lo_lab import dist
from lo_lab.dist import StepSet
from lo_lab.errors import CapacityError, ValidationError

from conftest import brute_force_law

steps_st = st.lists(st.integers(-12, 12), min_size=1, max_size=9)


def law_dict(d):
    return {s: w for s, w in d.nonzero()}


def test_stepset_fields():
    V = StepSet.of([3, -1, 3])
    assert V.n == 3 and not V.distinct and V.abs_sum == 7
    assert StepSet.v0(5).steps == (-2, -1, 0, 1, 2)
    assert StepSet.parse("-2, -1,0,1,2") == StepSet.v0(5)
    with pytest.raises(ValidationError):
        StepSet.of([])
    with pytest.raises(ValidationError):
        StepSet.v0(4)


def test_single_step():
    d = dist.exact_distribution([5])
    assert law_dict(d) == {-5: Fraction(1, 2), 5: Fraction(1, 2)}


def test_two_steps():
    d = dist.exact_distribution([1, 2])
    assert law_dict(d) == {s: Fraction(1, 4) for s in (-3, -1, 1, 3)}


def test_zero_step_is_identity():
    d = dist.exact_distribution([-1, 0, 1])
    assert law_dict(d) == {-2: Fraction(1, 4), 0: Fraction(1, 2), 2: Fraction(1, 4)}


@pytest.mark.parametrize(
    "steps, expected, argmax",
    [
        ([1, 1, 1, 1], Fraction(3, 8), (0,)),
        ([-2, -1, 0, 1, 2], Fraction(1, 4), (0,)),
        ([-3, -2, -1, 0, 1, 2, 3], Fraction(5, 32), (0,)),
        ([1, 2], Fraction(1, 4), (-3, -1, 1, 3)),
    ],
)
def test_rho(steps, expected, argmax):
    res = dist.rho(steps)
    assert res.rho == expected
    assert res.argmax_values == argmax


def test_rho_at():
    assert dist.rho_at(StepSet.v0(7), 1) == 0
    assert dist.rho_at([1, 2], 3) == Fraction(1, 4)
    assert dist.rho_at([1, 2], 100) == 0


@pytest.mark.parametrize("n, expected", [(1, Fraction(1, 2)), (4, Fraction(3, 8)), (5, Fraction(5, 16))])
def test_erdos_bound(n, expected):
    assert dist.erdos_bound(n) == expected


def test_capacity_error(monkeypatch):
    monkeypatch.setattr(dist, "MAX_EXACT_WIDTH", 100)
    with pytest.raises(CapacityError):
        dist.exact_distribution([30, 30])


def test_large_n_uses_python_ints():
    d = dist.exact_distribution([1] * 70)
    assert d.values.dtype == object
    assert d.total_mass == 1
    assert dist.rho([1] * 70).rho == dist.erdos_bound(70)


def test_unknown_backend():
    with pytest.raises(ValidationError):
        dist.distribution([1], backend="quad")


@given(steps_st)
def test_matches_enumeration(steps):
    assert law_dict(dist.exact_distribution(steps)) == brute_force_law(steps)


@given(steps_st)
def test_symmetry_mass_and_support(steps):
    d = dist.exact_distribution(steps)
    assert d.total_mass == 1
    bound = sum(abs(v) for v in steps)
    for s, w in d.nonzero():
        assert -bound <= s <= bound
        assert d.prob(-s) == w
        assert (s - sum(steps)) % 2 == 0


@given(steps_st, st.data())
def test_sign_flip_invariance(steps, data):
    i = data.draw(st.integers(0, len(steps) - 1))
    flipped = list(steps)
    flipped[i] = -flipped[i]
    assert dist.exact_distribution(steps) == dist.exact_distribution(flipped)


@given(steps_st, st.integers(-5, 5).filter(bool))
def test_dilation_equivariance(steps, l):
    base = dist.exact_distribution(steps)
    scaled = dist.exact_distribution([l * v for v in steps])
    for s, w in base.nonzero():
        assert scaled.prob(l * s) == w
    assert dist.rho(steps).rho == dist.rho([l * v for v in steps]).rho


@given(st.lists(st.integers(-30, 30).filter(bool), min_size=1, max_size=12))
def test_erdos_bound_holds(steps):
    assert dist.rho(steps).rho <= dist.erdos_bound(len(steps))


@settings(max_examples=50)
@given(st.lists(st.integers(-40, 40), min_size=1, max_size=30))
def test_backends_agree(steps):
    exact = dist.distribution(steps, "exact")
    approx = dist.distribution(steps, "float")
    assert exact.offset == approx.offset
    for we, wf in zip(exact.weights, approx.weights):
        assert abs(float(we) - wf) <= 1e-10


def test_float_backend_mass():
    d = dist.distribution(StepSet.v0(301), "float")
    assert abs(d.total_mass - 1.0) <= 1e-12


@pytest.mark.parametrize("steps, truth", [([1], 0.5), ([1, 2], 0.25), (list(range(-3, 4)), 5 / 32)])
def test_monte_carlo(steps, truth):
    res = dist.monte_carlo_rho(steps, samples=100_000, seed=11)
    assert abs(res.rho_hat - truth) <= 4 * res.stderr


def test_monte_carlo_deterministic():
    a = dist.monte_carlo_rho([1, 2, 5], 10_000, seed=3)
    b = dist.monte_carlo_rho([1, 2, 5], 10_000, seed=3)
    assert a == b
    with pytest.raises(ValidationError):
        dist.monte_carlo_rho([1], 0, seed=0)
