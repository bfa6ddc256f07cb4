import itertools

import numpy as np
import pytest

from robustgame.dims import PatternClass
from robustgame.rademacher import (
    MaxMixtureReport,
    max_mixture_rademacher_check,
    rademacher_exact,
    rademacher_mc,
    sample_max_mixture_members,
)


def brute_force_rademacher(values) -> float:
    """Oracle: direct loop over every sign vector."""
    values = np.asarray(values, dtype=float)
    n = values.shape[1]
    total = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=n):
        total += max(float(np.dot(signs, row)) for row in values)
    return total / (2**n * n)


def test_single_pattern_has_zero_complexity():
    cls = PatternClass.real([[0.3, -0.7, 0.2]])
    assert rademacher_exact(cls).value == pytest.approx(0.0, abs=1e-12)


def test_full_cube_has_complexity_one():
    n = 4
    cube = PatternClass.binary(list(itertools.product((-1, 1), repeat=n)))
    assert rademacher_exact(cube).value == pytest.approx(1.0)


def test_antipodal_pair():
    cls = PatternClass.real([[1.0, 1.0], [-1.0, -1.0]])
    # enumerate four sign vectors by hand: suprema 2, 0, 0, 2 -> mean/n = 0.5
    assert rademacher_exact(cls).value == pytest.approx(0.5)


@pytest.mark.parametrize("seed", range(5))
def test_exact_matches_bruteforce(seed):
    rng = np.random.default_rng(seed)
    values = rng.uniform(-1, 1, (int(rng.integers(1, 6)), int(rng.integers(2, 7))))
    cls = PatternClass.real(values)
    assert rademacher_exact(cls).value == pytest.approx(
        brute_force_rademacher(cls.patterns), abs=1e-12
    )


def test_exact_value_bounded_by_max_entry():
    rng = np.random.default_rng(42)
    values = rng.uniform(-0.4, 0.4, (5, 6))
    cls = PatternClass.real(values)
    estimate = rademacher_exact(cls)
    assert estimate.value <= np.abs(cls.patterns).max() + 1e-12


def test_exact_guard():
    cls = PatternClass.real(np.zeros((1, 23)))
    with pytest.raises(ValueError, match="guard"):
        rademacher_exact(cls)


def test_mc_single_pattern_centered():
    cls = PatternClass.real([[0.4, -0.2, 0.9, 0.1]])
    est = rademacher_mc(cls, trials=4000, seed=7)
    assert abs(est.value) <= 3 * est.std_error + 1e-9


def test_mc_full_cube_exact_every_trial():
    cube = PatternClass.binary(list(itertools.product((-1, 1), repeat=3)))
    est = rademacher_mc(cube, trials=500, seed=1)
    assert est.value == pytest.approx(1.0)
    assert est.std_error == pytest.approx(0.0, abs=1e-12)


def test_mc_reproducible():
    cls = PatternClass.real(np.random.default_rng(3).uniform(-1, 1, (4, 8)))
    a = rademacher_mc(cls, trials=200, seed=99)
    b = rademacher_mc(cls, trials=200, seed=99)
    assert a.value == b.value


@pytest.mark.parametrize("seed", range(4))
def test_mc_agrees_with_exact(seed):
    rng = np.random.default_rng(900 + seed)
    cls = PatternClass.real(rng.uniform(-1, 1, (5, int(rng.integers(3, 12)))))
    exact = rademacher_exact(cls).value
    mc = rademacher_mc(cls, trials=6000, seed=seed)
    assert abs(mc.value - exact) <= 4 * mc.std_error + 1e-9


def test_monotone_under_inclusion():
    rng = np.random.default_rng(10)
    base = rng.uniform(-1, 1, (4, 6))
    small = PatternClass.real(base[:2])
    big = PatternClass.real(base)
    assert rademacher_exact(small).value <= rademacher_exact(big).value + 1e-12


def test_hull_members_never_raise_complexity():
    # mixing members of one class never beats its vertices
    rng = np.random.default_rng(20)
    base = rng.uniform(-1, 1, (4, 6))
    combos = rng.dirichlet(np.ones(4), size=30) @ base
    plain = rademacher_exact(PatternClass.real(base)).value
    extended = rademacher_exact(PatternClass.real(np.vstack([base, combos]))).value
    assert extended == pytest.approx(plain, abs=1e-12)


def test_single_class_mixtures_attain_but_never_exceed():
    # the k = 1 case of the shared-coefficient check is the hull identity
    rng = np.random.default_rng(30)
    cls = PatternClass.real(rng.uniform(-1, 1, (4, 7)))
    report = max_mixture_rademacher_check([cls], combo_samples=4000, seed=5)
    assert isinstance(report, MaxMixtureReport)
    assert report.excess <= 1e-9
    assert report.with_mixtures_value >= report.max_value - 1e-12


def test_two_singleton_classes_reproduce_max_value():
    a = PatternClass.real([[0.2, -0.4, 0.6]])
    b = PatternClass.real([[-0.1, 0.5, 0.0]])
    report = max_mixture_rademacher_check([a, b], combo_samples=200, seed=3)
    # all mixtures of singletons collapse to the single max pattern
    assert report.excess == pytest.approx(0.0, abs=1e-12)
    assert report.max_class_size == 1


def test_sampled_members_live_in_the_mixture_max_class():
    rng = np.random.default_rng(8)
    classes = [PatternClass.real(rng.uniform(-1, 1, (3, 5))) for _ in range(2)]
    members = sample_max_mixture_members(classes, count=50, seed=2)
    # every member is pointwise at least the smallest class value and at most
    # the largest mixture value
    lo = min(c.patterns.min() for c in classes)
    hi = max(c.patterns.max() for c in classes)
    assert members.min() >= lo - 1e-12 and members.max() <= hi + 1e-12


def test_shared_coefficient_mixtures_can_exceed_max_class():
    # counterexample kept in the repo: with two 0/1 classes the shared-weight
    # mixture (1/6, 5/6) beats every max-class vertex at the all-minus sign
    # vector, so the mixture-then-max class is strictly richer than the max
    # class for this complexity
    a = PatternClass.real([[1, 0, 0], [1, 1, 0], [0, 0, 1]])
    b = PatternClass.real([[0, 1, 0], [1, 0, 1]])
    mix_a = (1 / 6) * np.array([1.0, 0.0, 0.0]) + (5 / 6) * np.array([0.0, 0.0, 1.0])
    mix_b = (1 / 6) * np.array([0.0, 1.0, 0.0]) + (5 / 6) * np.array([1.0, 0.0, 1.0])
    member = np.maximum(mix_a, mix_b)[None, :]
    from robustgame.dims import pointwise_max_class
    from robustgame.rademacher import _mean_supremum_exact

    base = pointwise_max_class([a, b]).patterns.astype(float)
    r_max = _mean_supremum_exact(base)
    r_with = _mean_supremum_exact(np.vstack([base, member]))
    assert r_with - r_max == pytest.approx(1 / 144, abs=1e-12)
