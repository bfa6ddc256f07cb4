"""Exact minimax solver for the empirical corruption game.

The learner picks a mixture Q over hypotheses, the adversary picks one
corruption per sample example; the value is the worst-case mean mixture loss.
The optimum solves a small dense LP:

    minimize   (1/n) * sum_i t_i
    subject to t_i >= sum_h Q_h * loss(h, z, y_i)   for every z in rho(x_i)
               sum_h Q_h = 1,  Q >= 0

This module is the ground-truth oracle the training loop is validated
against, so every solve is certified on the spot: the returned value must
match the empirical risk of the returned mixture, the dual objective, and
the payoff guaranteed by the adversary strategy recovered from the binding
constraints.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hypotheses import MixtureStrategy, empirical_risk, padded_loss_tensor
from .model import GameInstance
from .simplex import LpError, solve_equality_lp

SIZE_GUARD = 10**7
CERT_TOL = 1e-6


@dataclass(frozen=True)
class ExactSolution:
    """Certified minimax optimum of an empirical corruption game."""

    value: float
    mixture: MixtureStrategy
    slacks: np.ndarray
    adversary_rows: tuple[np.ndarray, ...]
    iterations: int


def _game_arrays(instance: GameInstance):
    sample = instance.sample
    losses, valid, _ = padded_loss_tensor(
        sample.x_indices, sample.labels, instance.rho, instance.hypotheses, instance.loss
    )
    return losses, valid


def exact_game_value(instance: GameInstance) -> ExactSolution:
    """Solve the empirical game exactly and certify the optimum.

    Raises ValueError when the dense formulation would exceed the size guard
    and LpError if the solver misbehaves (a valid instance is always
    feasible, so infeasibility signals an internal bug).
    """
    losses, valid = _game_arrays(instance)
    num_h, n, width = losses.shape
    widths = valid.sum(axis=1)
    total_rows = int(widths.sum())
    if num_h * total_rows > SIZE_GUARD:
        raise ValueError(
            f"instance too large for the dense solver: |H| * sum|rho| = {num_h * total_rows}"
        )

    # Variables: [Q_0..Q_{H-1}, t_0..t_{n-1}, s_0..s_{R-1}] with one slack per
    # (example, corruption) inequality.
    num_vars = num_h + n + total_rows
    A = np.zeros((total_rows + 1, num_vars))
    b = np.zeros(total_rows + 1)
    c = np.zeros(num_vars)
    c[num_h : num_h + n] = 1.0 / n

    row = 0
    row_of: list[tuple[int, int]] = []
    for i in range(n):
        for j in range(int(widths[i])):
            A[row, :num_h] = losses[:, i, j]
            A[row, num_h + i] = -1.0
            A[row, num_h + n + row] = 1.0
            row_of.append((i, j))
            row += 1
    A[row, :num_h] = 1.0
    b[row] = 1.0

    solution = solve_equality_lp(c, A, b)
    q = np.clip(solution.x[:num_h], 0.0, None)
    q /= q.sum()
    slacks = solution.x[num_h : num_h + n]
    value = float(slacks.mean())

    mixture = MixtureStrategy(np.arange(num_h), q)
    adversary_rows = _adversary_from_duals(
        solution.duals, row_of, widths, losses, valid, q
    )
    _certify(instance, mixture, value, adversary_rows, losses, valid, solution)
    return ExactSolution(
        value=value,
        mixture=mixture,
        slacks=slacks,
        adversary_rows=adversary_rows,
        iterations=solution.iterations,
    )


def _adversary_from_duals(duals, row_of, widths, losses, valid, q):
    """Recover the adversary's optimal per-example distributions.

    The multiplier of constraint (i, j) scaled by n is the optimal mass the
    adversary puts on corruption j of example i.  Degenerate examples can be
    left with a mass deficit by the LP; the deficit goes onto that example's
    best response against the returned mixture, which never lowers any
    hypothesis's weighted loss.
    """
    n = len(widths)
    mixture_losses = np.einsum("h,hij->ij", q, losses)
    mixture_losses = np.where(valid, mixture_losses, -np.inf)
    rows = [np.zeros(int(widths[i])) for i in range(n)]
    for (i, j), y in zip(row_of, duals[:-1]):
        rows[i][j] = max(0.0, float(-y)) * n
    out = []
    for i, r in enumerate(rows):
        deficit = 1.0 - r.sum()
        if deficit > 0:
            r[int(np.argmax(mixture_losses[i, : r.size]))] += deficit
        out.append(r / r.sum())
    return tuple(out)


def _certify(instance, mixture, value, adversary_rows, losses, valid, lp) -> None:
    risk = empirical_risk(
        mixture, instance.sample, instance.rho, instance.hypotheses, instance.loss
    )
    if abs(risk - value) > CERT_TOL:
        raise LpError(f"certification failed: risk(Q*)={risk} vs value={value}")
    dual_value = float(lp.duals[-1])
    if abs(dual_value - value) > CERT_TOL:
        raise LpError(f"certification failed: dual value {dual_value} vs {value}")
    n = len(adversary_rows)
    per_h = np.zeros(losses.shape[0])
    for i, r in enumerate(adversary_rows):
        per_h += losses[:, i, : r.size] @ r / n
    if per_h.min() < value - CERT_TOL:
        raise LpError(
            f"certification failed: adversary guarantees {per_h.min()} < value {value}"
        )
    if not -CERT_TOL <= value <= 1.0 + CERT_TOL:
        raise LpError(f"certification failed: value {value} outside [0, 1]")


def best_response_adversary(
    mixture: MixtureStrategy, instance: GameInstance
) -> tuple[list[int], float]:
    """Per-example corruption choice maximizing the mixture's loss.

    Ties go to the earliest list position.  The attained value equals the
    mixture's empirical risk by definition.
    """
    losses, valid = _game_arrays(instance)
    alpha = mixture.dense(instance.hypotheses.size)
    mixed = np.einsum("h,hij->ij", alpha, losses)
    mixed = np.where(valid, mixed, -np.inf)
    choices = [int(j) for j in mixed.argmax(axis=1)]
    attained = float(mixed.max(axis=1).mean())
    return choices, attained
