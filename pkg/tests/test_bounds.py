import math

import numpy as np
import pytest

from robustgame.bounds import (
    BoundConfig,
    adaptive_simpson,
    constant_profile,
    dudley_entropy_bound,
    entropy_integral,
    entropy_integral_closed_form,
    entropy_integral_quadrature,
    graph_dim_from_natarajan,
    linear_predictor_complexity,
    power_profile,
    sample_size_binary,
    sample_size_multiclass,
    sample_size_regression,
    step_profile,
)


def test_adaptive_simpson_on_polynomials():
    assert adaptive_simpson(lambda x: x**2, 0, 1) == pytest.approx(1 / 3, abs=1e-10)
    assert adaptive_simpson(math.sin, 0, math.pi) == pytest.approx(2.0, abs=1e-8)


def test_binary_sample_size_forced_arithmetic():
    cfg = BoundConfig(epsilon=1.0, delta=math.exp(-1.0), k=1, vc=1)
    # k ln(max(k,2)) VC + ln(1/delta) = ln 2 + 1 -> ceil = 2
    assert sample_size_binary(cfg) == 2


def test_binary_sample_size_quadruples_when_epsilon_halves():
    base = BoundConfig(epsilon=0.2, delta=0.1, k=3, vc=4)
    half = BoundConfig(epsilon=0.1, delta=0.1, k=3, vc=4)
    m_base, m_half = sample_size_binary(base), sample_size_binary(half)
    exact = (3 * math.log(3) * 4 + math.log(10)) / 0.04
    assert m_base == math.ceil(exact)
    assert m_half == math.ceil(4 * exact)


def test_binary_sample_size_linear_in_vc():
    cfg1 = BoundConfig(epsilon=0.1, delta=0.1, k=2, vc=3)
    cfg2 = BoundConfig(epsilon=0.1, delta=0.1, k=2, vc=6)
    t1 = 2 * math.log(2) * 3
    t2 = 2 * math.log(2) * 6
    assert sample_size_binary(cfg2) - sample_size_binary(cfg1) in (
        math.ceil((t2 + math.log(10)) / 0.01) - math.ceil((t1 + math.log(10)) / 0.01),
    )


def test_multiclass_equals_binary_when_graph_equals_vc():
    cfg = BoundConfig(epsilon=0.1, delta=0.05, k=3, vc=4, graph_dim=4)
    assert sample_size_multiclass(cfg, "graph") == sample_size_binary(cfg)


def test_multiclass_natarajan_route():
    assert graph_dim_from_natarajan(3, 2) == pytest.approx(4.67 * 3)
    cfg = BoundConfig(
        epsilon=0.2, delta=0.1, k=2, natarajan_dim=3, num_labels=2
    )
    direct = BoundConfig(epsilon=0.2, delta=0.1, k=2, graph_dim=int(4.67 * 3))
    # the route scales by exactly 4.67 log2(2)
    got = sample_size_multiclass(cfg, "natarajan")
    term = 2 * math.log(2) * 4.67 * 3
    assert got == math.ceil((term + math.log(10)) / 0.04)


def test_multiclass_zero_graph_dim_leaves_confidence_term():
    cfg = BoundConfig(epsilon=0.5, delta=0.1, k=4, graph_dim=0)
    assert sample_size_multiclass(cfg) == math.ceil(math.log(10) / 0.25)


def test_dudley_zero_profile_gives_four_alpha():
    profile = constant_profile(0.0)
    assert dudley_entropy_bound(profile, n=100, alpha=0.3) == pytest.approx(1.2)
    assert dudley_entropy_bound(profile, n=100, alpha=0.0) == pytest.approx(0.0)


def test_dudley_nonincreasing_in_n():
    profile = constant_profile(3.0)
    b1 = dudley_entropy_bound(profile, n=50, alpha=0.1)
    b2 = dudley_entropy_bound(profile, n=200, alpha=0.1)
    assert b2 <= b1


def test_entropy_integral_inverse_square_profile_closed_form():
    # fat(g) = 1/g^2 turns the integrand into sqrt(ln(2/g)) / g
    profile = power_profile(1.0, 2.0)
    got = entropy_integral(profile, alpha=0.25)
    assert got == pytest.approx(entropy_integral_closed_form(0.25), abs=1e-6)
    assert got == pytest.approx(1.61444, abs=1e-4)


@pytest.mark.parametrize("alpha", [0.01, 0.05, 0.1, 0.25, 0.5])
def test_quadrature_matches_closed_form(alpha):
    assert entropy_integral_quadrature(alpha) == pytest.approx(
        entropy_integral_closed_form(alpha), abs=1e-6
    )


def test_entropy_integral_divergence_detected():
    profile = power_profile(1.0, 2.0)
    with pytest.raises(ValueError, match="diverges"):
        entropy_integral(profile, alpha=0.0)


def test_regression_sample_size_zero_profile():
    cfg = BoundConfig(
        epsilon=0.5, delta=0.1, k=2, fat_profile=constant_profile(0.0)
    )
    assert sample_size_regression(cfg) == math.ceil(math.log(10) / 0.25)


def test_regression_divergence_points_to_refined_route():
    cfg = BoundConfig(
        epsilon=0.1, delta=0.1, k=2, fat_profile=power_profile(1.0, 2.0)
    )
    with pytest.raises(ValueError, match="refined"):
        sample_size_regression(cfg)


def test_regression_l2_uses_half_scale():
    profile = power_profile(1.0, 0.5)  # fat(g) = g^{-1/2}, integrable at zero
    cfg = BoundConfig(epsilon=0.1, delta=0.1, k=2, fat_profile=profile)
    m_l1 = sample_size_regression(cfg, "l1")
    m_l2 = sample_size_regression(cfg, "l2")
    assert m_l2 >= m_l1  # fat at gamma/2 dominates fat at gamma


def test_regression_end_to_end_matches_hand_formula():
    # step profile as produced by the dimension calculators on a small class
    gammas = [0.1, 0.2, 0.4, 1.0]
    values = [3, 2, 1, 0]
    profile = step_profile(gammas, values)
    cfg = BoundConfig(epsilon=0.2, delta=0.05, k=3, fat_profile=profile)
    got = sample_size_regression(cfg, "l1")
    integral = entropy_integral(profile, alpha=0.0)
    by_hand = math.ceil(
        (3 * math.log(3) * integral + math.log(20)) / 0.04
    )
    assert got == by_hand
    # spreadsheet-style recomputation of the integral over the three steps
    pieces = 0.0
    for lo, hi, fat in ((0.0, 0.1, 3), (0.1, 0.2, 2), (0.2, 0.4, 1), (0.4, 1.0, 0)):
        pieces += adaptive_simpson(
            lambda g: math.sqrt(fat * math.log(2 / g)) if g > 0 else 0.0,
            max(lo, 1e-13),
            hi,
        )
    assert integral == pytest.approx(pieces, abs=1e-5)


def test_step_profile_must_be_nonincreasing():
    with pytest.raises(ValueError):
        step_profile([0.1, 0.2], [1, 2])


def test_linear_predictor_bound_decays():
    small = linear_predictor_complexity(0.1, 0.05, 4, 10**3)
    large = linear_predictor_complexity(0.1, 0.05, 4, 10**6)
    assert large.rademacher_bound < small.rademacher_bound


def test_linear_predictor_quadrupling_sample_roughly_halves_bound():
    r1 = linear_predictor_complexity(0.1, 0.05, 4, 10_000).rademacher_bound
    r2 = linear_predictor_complexity(0.1, 0.05, 4, 40_000).rademacher_bound
    assert 0.4 <= r2 / r1 <= 0.65


def test_linear_predictor_m0_monotonicity():
    base = linear_predictor_complexity(0.1, 0.05, 4, 1000).m0
    assert linear_predictor_complexity(0.05, 0.05, 4, 1000).m0 > base
    assert linear_predictor_complexity(0.1, 0.01, 4, 1000).m0 > base
    assert linear_predictor_complexity(0.1, 0.05, 8, 1000).m0 > base


def test_m0_monotone_in_inputs():
    base = BoundConfig(epsilon=0.2, delta=0.1, k=2, vc=3)
    assert sample_size_binary(BoundConfig(epsilon=0.1, delta=0.1, k=2, vc=3)) >= (
        sample_size_binary(base)
    )
    assert sample_size_binary(BoundConfig(epsilon=0.2, delta=0.01, k=2, vc=3)) >= (
        sample_size_binary(base)
    )
    assert sample_size_binary(BoundConfig(epsilon=0.2, delta=0.1, k=4, vc=3)) >= (
        sample_size_binary(base)
    )
    assert sample_size_binary(BoundConfig(epsilon=0.2, delta=0.1, k=2, vc=6)) >= (
        sample_size_binary(base)
    )


def test_config_validation():
    with pytest.raises(ValueError):
        BoundConfig(epsilon=0.0, delta=0.1, k=1)
    with pytest.raises(ValueError):
        BoundConfig(epsilon=0.1, delta=1.0, k=1)
    with pytest.raises(ValueError):
        BoundConfig(epsilon=0.1, delta=0.1, k=0)
    with pytest.raises(ValueError):
        sample_size_binary(BoundConfig(epsilon=0.1, delta=0.1, k=1))  # no VC
