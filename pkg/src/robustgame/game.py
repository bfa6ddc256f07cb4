"""Adversary-vs-learner training: multiplicative weights against ERM responses.

Each sample example runs its own multiplicative-weights update over its
corruption list; each round the learner answers the induced corrupted-pair
distribution with an ERM hypothesis.  The uniform mixture over the returned
hypotheses and the averaged adversary strategy are near-optimal for the
empirical game.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hypotheses import (
    HypothesisClass,
    LossKind,
    MixtureStrategy,
    empirical_risk,
    padded_loss_tensor,
)
from .model import SIMPLEX_TOL, GameInstance, _frozen_array


@dataclass(frozen=True)
class AdversaryStrategy:
    """Per-example distribution over that example's corruption list."""

    rows: tuple[np.ndarray, ...]

    def __post_init__(self):
        frozen = []
        for i, row in enumerate(self.rows):
            arr = _frozen_array(row, np.float64)
            if arr.ndim != 1 or arr.size < 1:
                raise ValueError(f"adversary row {i} must be a nonempty vector")
            if np.any(arr < 0):
                raise ValueError(f"adversary row {i} has negative mass")
            if abs(float(arr.sum()) - 1.0) > SIMPLEX_TOL:
                raise ValueError(f"adversary row {i} is not normalized")
            frozen.append(arr)
        object.__setattr__(self, "rows", tuple(frozen))

    @classmethod
    def uniform(cls, instance: GameInstance) -> "AdversaryStrategy":
        rows = []
        for x in instance.sample.x_indices:
            width = len(instance.rho.lists[int(x)])
            rows.append(np.full(width, 1.0 / width))
        return cls(tuple(rows))


@dataclass(frozen=True)
class WeightedPairs:
    """Merged corrupted-pair distribution: (z, y) pairs with probabilities."""

    z_indices: np.ndarray
    labels: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z_indices", _frozen_array(self.z_indices, np.int64))
        object.__setattr__(self, "labels", _frozen_array(self.labels, np.float64))
        object.__setattr__(self, "weights", _frozen_array(self.weights, np.float64))

    def as_dict(self) -> dict[tuple[int, float], float]:
        return {
            (int(z), float(y)): float(w)
            for z, y, w in zip(self.z_indices, self.labels, self.weights)
        }


@dataclass(frozen=True)
class TrainOutput:
    """Hypotheses h_1..h_T, the averaged adversary strategy, and per-round
    diagnostics (ERM objective and the log of the raw weight total)."""

    hypothesis_indices: np.ndarray
    adversary: AdversaryStrategy
    erm_objectives: np.ndarray
    log_weight_totals: np.ndarray
    eta: float

    @property
    def rounds(self) -> int:
        return int(self.hypothesis_indices.size)

    def mixture(self) -> MixtureStrategy:
        return MixtureStrategy.uniform(self.hypothesis_indices)


class _PairMerge:
    """First-occurrence merge of (example, slot) cells into (z, y) pairs.

    The merge layout is fixed per instance, so round after round only the
    weights change; scanning order is example-major, slot-minor, which makes
    the merged output identical to a dict-accumulation pass.
    """

    def __init__(self, instance: GameInstance):
        losses, valid, z_slots = padded_loss_tensor(
            instance.sample.x_indices,
            instance.sample.labels,
            instance.rho,
            instance.hypotheses,
            instance.loss,
        )
        self.losses = losses
        self.valid = valid
        self.widths = valid.sum(axis=1)
        n = len(instance.sample)
        pair_index: dict[tuple[int, float], int] = {}
        cell_to_pair = []
        pair_z: list[int] = []
        pair_y: list[float] = []
        for i in range(n):
            y = float(instance.sample.labels[i])
            for j in range(int(self.widths[i])):
                key = (int(z_slots[i, j]), y)
                if key not in pair_index:
                    pair_index[key] = len(pair_z)
                    pair_z.append(key[0])
                    pair_y.append(key[1])
                cell_to_pair.append(pair_index[key])
        self.cell_to_pair = np.asarray(cell_to_pair, dtype=np.int64)
        self.pair_z = np.asarray(pair_z, dtype=np.int64)
        self.pair_y = np.asarray(pair_y, dtype=np.float64)
        flat_cells = valid.reshape(-1)
        self.flat_valid = np.flatnonzero(flat_cells)
        self.num_examples = n
        # Loss of every hypothesis at every merged pair, for ERM scoring.
        from .hypotheses import _losses_at

        self.pair_losses = _losses_at(
            instance.hypotheses, self.pair_z, self.pair_y, instance.loss
        )

    def pair_weights(self, padded_p: np.ndarray) -> np.ndarray:
        flat = padded_p.reshape(-1)[self.flat_valid] / self.num_examples
        return np.bincount(
            self.cell_to_pair, weights=flat, minlength=self.pair_z.size
        )


def corrupted_pair_distribution(
    strategy: AdversaryStrategy, instance: GameInstance
) -> WeightedPairs:
    """Distribution over corrupted pairs (z, y) induced by an adversary
    strategy and the empirical (uniform) distribution on the sample.

    Identical pairs arising from different examples are merged by summing
    their mass; weights are nonnegative and sum to 1.
    """
    merge = _PairMerge(instance)
    padded = np.zeros_like(merge.valid, dtype=np.float64)
    for i, row in enumerate(strategy.rows):
        if row.size != merge.widths[i]:
            raise ValueError(f"adversary row {i} length {row.size} != |rho(x_i)|")
        padded[i, : row.size] = row
    weights = merge.pair_weights(padded)
    return WeightedPairs(merge.pair_z, merge.pair_y, weights)


def erm_oracle(hclass: HypothesisClass, pairs: WeightedPairs, kind: LossKind) -> int:
    """Index of the hypothesis minimizing the weighted loss over the pairs.

    Ties break toward the smallest index.
    """
    if pairs.z_indices.size == 0:
        raise ValueError("cannot run ERM on an empty pair list")
    from .hypotheses import _losses_at

    scores = _losses_at(hclass, pairs.z_indices, pairs.labels, kind) @ pairs.weights
    return int(np.argmin(scores))


def horizon_for(n: int, k: int, epsilon: float) -> int:
    """Number of rounds sufficient for epsilon-optimal strategies on a sample
    of size n with corruption budget k: ceil(4 n ln(k) / epsilon^2).

    Natural log, with k floored at 2 inside the log; a budget of 1 leaves the
    adversary no choice, so a single round suffices.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    if k == 1:
        return 1
    return math.ceil(4.0 * n * math.log(max(k, 2)) / (epsilon * epsilon))


def default_eta(k: int, rounds: int) -> float:
    """Standard regret-tuned step size, capped at 1/2."""
    return min(0.5, math.sqrt(math.log(max(k, 2)) / rounds))


def mw_train(instance: GameInstance, rounds: int, eta: float | None = None) -> TrainOutput:
    """Run the adversary's multiplicative-weights updates against ERM replies.

    Weights start at 1 on every (example, corruption) cell.  Each round the
    per-example weights are normalized into the adversary strategy P^t, the
    ERM oracle answers the induced corrupted-pair distribution, and every
    cell's weight is multiplied by (1 + eta * loss of the reply at that
    cell).  Stored weights are renormalized per example each round to avoid
    overflow on long runs; the raw totals are tracked in log space for the
    diagnostics.  Deterministic: a pure function of its arguments.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if eta is None:
        eta = default_eta(instance.budget, rounds)
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must lie in (0, 1]")

    merge = _PairMerge(instance)
    losses, valid = merge.losses, merge.valid
    n, width = valid.shape

    w = valid.astype(np.float64)
    log_offsets = np.zeros(n)
    p_sum = np.zeros((n, width))
    picked = np.empty(rounds, dtype=np.int64)
    objectives = np.empty(rounds)
    log_totals = np.empty(rounds)

    for t in range(rounds):
        row_sums = w.sum(axis=1, keepdims=True)
        p = w / row_sums
        weights = merge.pair_weights(p)
        scores = merge.pair_losses @ weights
        h = int(np.argmin(scores))
        picked[t] = h
        objectives[t] = scores[h]
        p_sum += p

        w *= 1.0 + eta * losses[h]
        totals = w.sum(axis=1)
        log_offsets += np.log(totals)
        log_totals[t] = float(np.logaddexp.reduce(log_offsets))
        w /= totals[:, None]

    p_bar = p_sum / rounds
    adversary = AdversaryStrategy(
        tuple(p_bar[i, : int(merge.widths[i])] for i in range(n))
    )
    return TrainOutput(
        hypothesis_indices=picked,
        adversary=adversary,
        erm_objectives=objectives,
        log_weight_totals=log_totals,
        eta=float(eta),
    )


def learner_guarantee(output: TrainOutput, instance: GameInstance) -> float:
    """Worst-case empirical risk of the uniform mixture over the returned
    hypotheses: what the learner concedes to a best-responding adversary."""
    return empirical_risk(
        output.mixture(), instance.sample, instance.rho, instance.hypotheses, instance.loss
    )


def adversary_guarantee(strategy: AdversaryStrategy, instance: GameInstance) -> float:
    """Payoff the adversary strategy forces against the learner's best reply:
    the minimum over hypotheses of the pair-weighted loss."""
    pairs = corrupted_pair_distribution(strategy, instance)
    from .hypotheses import _losses_at

    scores = _losses_at(
        instance.hypotheses, pairs.z_indices, pairs.labels, instance.loss
    ) @ pairs.weights
    return float(scores.min())
