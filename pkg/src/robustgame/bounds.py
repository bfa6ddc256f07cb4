"""Sample-complexity and capacity-bound formulas as evaluable functions.

Leading constants hidden inside the order statements are explicit
configuration parameters defaulting to 1; nothing here claims tight
constants.  Logs are natural throughout, except the base-2 factor in the
Natarajan route, which is stated base-2 at its source.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

FatProfile = Callable[[float], float]

QUAD_TOL = 1e-8
QUAD_MAX_DEPTH = 40
_DIVERGENCE_TOL = 1e-7


# ---------------------------------------------------------------------------
# Quadrature


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = QUAD_TOL,
    max_depth: int = QUAD_MAX_DEPTH,
) -> float:
    """Adaptive Simpson quadrature by interval bisection."""
    if b <= a:
        return 0.0
    fa, fb = f(a), f(b)
    mid = 0.5 * (a + b)
    fm = f(mid)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_step(f, a, fa, b, fb, mid, fm, whole, tol, max_depth)


def _simpson_step(f, a, fa, b, fb, mid, fm, whole, tol, depth):
    lm = 0.5 * (a + mid)
    rm = 0.5 * (mid + b)
    flm, frm = f(lm), f(rm)
    left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return _simpson_step(
        f, a, fa, mid, fm, lm, flm, left, tol / 2.0, depth - 1
    ) + _simpson_step(f, mid, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)


# ---------------------------------------------------------------------------
# Fat-shattering profiles


def step_profile(gammas, values) -> FatProfile:
    """Non-increasing step profile from (scale, dimension) samples.

    Below the smallest sampled scale the profile is constant at its largest
    value; above the largest it is 0.
    """
    pairs = sorted(zip((float(g) for g in gammas), (float(v) for v in values)))
    gs = [g for g, _ in pairs]
    vs = [v for _, v in pairs]
    if any(b > a for a, b in zip(vs, vs[1:])):
        raise ValueError("fat profile must be non-increasing in gamma")

    def profile(gamma: float) -> float:
        if gamma <= 0:
            raise ValueError("profile is defined on positive scales")
        for g, v in zip(gs, vs):
            if gamma <= g:
                return v
        return 0.0

    return profile


def power_profile(coefficient: float, exponent: float) -> FatProfile:
    """fat(gamma) = coefficient / gamma^exponent."""
    if coefficient < 0 or exponent < 0:
        raise ValueError("power profile needs nonnegative parameters")

    def profile(gamma: float) -> float:
        if gamma <= 0:
            raise ValueError("profile is defined on positive scales")
        return coefficient / gamma**exponent

    return profile


def constant_profile(value: float) -> FatProfile:
    return lambda gamma: float(value)


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class BoundConfig:
    """Inputs to the sample-complexity formulas.

    ``c1``/``c2`` scale the dimension and confidence terms, ``k_tilde`` is
    the chaining constant, and ``fat_scale`` is the scale multiplier applied
    inside the fat profile; all default to 1 and may be overridden.
    """

    epsilon: float
    delta: float
    k: int
    vc: int | None = None
    graph_dim: int | None = None
    natarajan_dim: int | None = None
    num_labels: int | None = None
    fat_profile: FatProfile | None = None
    c1: float = 1.0
    c2: float = 1.0
    k_tilde: float = 1.0
    fat_scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0 + 1e-12:
            raise ValueError("epsilon must lie in (0, 1]")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        for name in ("c1", "c2", "k_tilde", "fat_scale"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def _m0(cfg: BoundConfig, dimension_term: float) -> int:
    confidence = math.log(1.0 / cfg.delta)
    return math.ceil(
        (cfg.c1 * dimension_term + cfg.c2 * confidence) / (cfg.epsilon**2)
    )


def sample_size_binary(cfg: BoundConfig) -> int:
    """Sample size m0 for uniform convergence with a binary class:
    ceil((1/eps^2) (c1 k ln(max(k,2)) VC + c2 ln(1/delta)))."""
    if cfg.vc is None:
        raise ValueError("config needs a VC dimension")
    term = cfg.k * math.log(max(cfg.k, 2)) * cfg.vc
    return _m0(cfg, term)


def graph_dim_from_natarajan(natarajan_dim: int, num_labels: int) -> float:
    """Upper bound 4.67 log2(labels) * Natarajan dimension."""
    if num_labels < 2:
        raise ValueError("need at least two labels")
    return 4.67 * math.log2(num_labels) * natarajan_dim


def sample_size_multiclass(cfg: BoundConfig, via: str = "graph") -> int:
    """Multiclass m0 through the graph dimension, or through the Natarajan
    dimension with the 4.67 log2(labels) conversion."""
    if via == "graph":
        if cfg.graph_dim is None:
            raise ValueError("config needs a graph dimension")
        dim: float = cfg.graph_dim
    elif via == "natarajan":
        if cfg.natarajan_dim is None or cfg.num_labels is None:
            raise ValueError("config needs a Natarajan dimension and label count")
        dim = graph_dim_from_natarajan(cfg.natarajan_dim, cfg.num_labels)
    else:
        raise ValueError(f"unknown route {via!r}")
    term = cfg.k * math.log(max(cfg.k, 2)) * dim
    return _m0(cfg, term)


# ---------------------------------------------------------------------------
# Entropy integral machinery


def entropy_integral(
    profile: FatProfile,
    alpha: float,
    fat_scale: float = 1.0,
    tol: float = QUAD_TOL,
) -> float:
    """integral_alpha^1 sqrt(fat(fat_scale * g) * ln(2/g)) dg.

    With alpha = 0 the integral is probed decade by decade toward 0 and
    declared divergent (ValueError) if the decade contributions fail to
    vanish; pass alpha > 0 in that case.
    """
    if alpha < 0 or alpha >= 1:
        raise ValueError("alpha must lie in [0, 1)")

    def integrand(g: float) -> float:
        fat = profile(fat_scale * g)
        return math.sqrt(max(fat, 0.0) * math.log(2.0 / g))

    if alpha > 0:
        return adaptive_simpson(integrand, alpha, 1.0, tol)

    total = adaptive_simpson(integrand, 1e-4, 1.0, tol)
    upper = 1e-4
    for _ in range(9):
        lower = upper / 10.0
        segment = adaptive_simpson(integrand, lower, upper, tol)
        total += segment
        upper = lower
        if segment <= _DIVERGENCE_TOL * max(1.0, total):
            return total
    raise ValueError(
        "entropy integral diverges at scale 0; pass alpha > 0 for the refined bound"
    )


def dudley_entropy_bound(
    profile: FatProfile,
    n: int,
    alpha: float,
    fat_scale: float = 1.0,
    k_tilde: float = 1.0,
) -> float:
    """Refined chaining bound 4 alpha + 12 sqrt(k_tilde/n) * entropy integral.

    With alpha = 0 this is the plain entropy-integral bound; it errors if the
    integral diverges there.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    integral = entropy_integral(profile, alpha, fat_scale)
    return 4.0 * alpha + 12.0 * math.sqrt(k_tilde / n) * integral


def sample_size_regression(cfg: BoundConfig, loss: str = "l1") -> int:
    """Regression m0 through the entropy integral of the fat profile.

    The L2 route evaluates the profile at half the scale.  A divergent
    integral raises ValueError pointing at the refined (alpha > 0) route.
    """
    if cfg.fat_profile is None:
        raise ValueError("config needs a fat-shattering profile")
    if loss not in ("l1", "l2"):
        raise ValueError("loss must be 'l1' or 'l2'")
    scale = cfg.fat_scale if loss == "l1" else cfg.fat_scale / 2.0
    try:
        entropy = entropy_integral(cfg.fat_profile, 0.0, scale)
    except ValueError as err:
        raise ValueError(
            "entropy integral diverges: use the refined alpha > 0 route "
            "(dudley_entropy_bound / linear_predictor_complexity)"
        ) from err
    term = cfg.k * math.log(max(cfg.k, 2)) * entropy
    return _m0(cfg, term)


# ---------------------------------------------------------------------------
# Bounded linear predictors (closed-form route)


def entropy_integral_closed_form(alpha: float) -> float:
    """integral_alpha^1 (1/t) sqrt(ln(2/t)) dt, in closed form:
    (2/3) (ln(2/alpha)^{3/2} - ln(2)^{3/2})."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    return (2.0 / 3.0) * (math.log(2.0 / alpha) ** 1.5 - math.log(2.0) ** 1.5)


def entropy_integral_quadrature(alpha: float, tol: float = QUAD_TOL) -> float:
    """Same integral as :func:`entropy_integral_closed_form`, by quadrature."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    return adaptive_simpson(
        lambda t: math.sqrt(math.log(2.0 / t)) / t, alpha, 1.0, tol
    )


@dataclass(frozen=True)
class LinearPredictorComplexity:
    rademacher_bound: float
    m0: int
    alpha: float


def linear_predictor_complexity(
    epsilon: float,
    delta: float,
    k: int,
    sample_size: int,
    c1: float = 1.0,
    c2: float = 1.0,
    c_prime: float = 1.0,
) -> LinearPredictorComplexity:
    """Complexity of bounded homogeneous linear predictors under corruption.

    Uses fat(scale) <= 1/scale^2 for unit-norm linear predictors, truncation
    scale alpha = 1/sqrt(sample size), and the closed-form entropy integral,
    giving a Rademacher bound of order sqrt(k ln(k) (ln sample)^3 / sample)
    and a sample complexity of order (1/eps^2)(k ln^2(k/eps) + ln(1/delta)).
    """
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    if not 0.0 < epsilon < 1.0 + 1e-12:
        raise ValueError("epsilon must lie in (0, 1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if k < 1:
        raise ValueError("k must be >= 1")
    alpha = 1.0 / math.sqrt(sample_size)
    integral = entropy_integral_closed_form(alpha)
    rademacher = 4.0 * alpha + 12.0 * c_prime * math.sqrt(
        2.0 * k * math.log(3 * k) / sample_size
    ) * integral
    log_term = math.log(max(k / epsilon, 2.0))
    m0 = math.ceil(
        (c1 * k * log_term**2 + c2 * math.log(1.0 / delta)) / epsilon**2
    )
    return LinearPredictorComplexity(
        rademacher_bound=rademacher, m0=m0, alpha=alpha
    )
