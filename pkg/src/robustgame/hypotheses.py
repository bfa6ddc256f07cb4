"""Hypothesis classes over corrupted inputs, the three loss kinds, and mixtures."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import (
    CATEGORICAL,
    REAL,
    SIMPLEX_TOL,
    Concept,
    CorruptionMap,
    Distribution,
    LabeledSample,
    _frozen_array,
)


class LossKind(enum.Enum):
    ZERO_ONE = "zero-one"
    L1 = "l1"
    L2 = "l2"

    @property
    def needs_real_labels(self) -> bool:
        return self in (LossKind.L1, LossKind.L2)


@dataclass(frozen=True)
class HypothesisClass:
    """A finite class as a value table: rows are hypotheses, columns are
    corrupted inputs.

    Categorical entries are label indices; real entries are clamped to [0, 1]
    at construction so that L1 and L2 losses stay within [0, 1].
    """

    table: np.ndarray
    kind: str
    num_labels: int | None = None

    def __post_init__(self):
        if self.kind == CATEGORICAL:
            table = _frozen_array(self.table, np.int64)
            if self.num_labels is None:
                object.__setattr__(self, "num_labels", int(table.max()) + 1)
            if np.any(table < 0):
                raise ValueError("categorical predictions must be nonnegative")
        elif self.kind == REAL:
            table = _frozen_array(np.clip(self.table, 0.0, 1.0), np.float64)
        else:
            raise ValueError(f"unknown hypothesis kind {self.kind!r}")
        if table.ndim != 2 or table.shape[0] < 1 or table.shape[1] < 1:
            raise ValueError("hypothesis table must be a nonempty 2-d array")
        object.__setattr__(self, "table", table)

    @property
    def size(self) -> int:
        return int(self.table.shape[0])

    @property
    def num_inputs(self) -> int:
        return int(self.table.shape[1])

    @classmethod
    def categorical(cls, table, num_labels: int | None = None) -> "HypothesisClass":
        return cls(np.asarray(table), CATEGORICAL, num_labels)

    @classmethod
    def real(cls, table) -> "HypothesisClass":
        return cls(np.asarray(table), REAL)

    @classmethod
    def for_loss(cls, table, kind: LossKind, num_labels: int | None = None) -> "HypothesisClass":
        if kind is LossKind.ZERO_ONE:
            return cls.categorical(table, num_labels)
        return cls.real(table)


@dataclass(frozen=True)
class MixtureStrategy:
    """Convex weights over hypothesis indices: the learner's randomized rule."""

    indices: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "indices", _frozen_array(self.indices, np.int64))
        object.__setattr__(self, "weights", _frozen_array(self.weights, np.float64))
        if self.indices.shape != self.weights.shape or self.indices.ndim != 1:
            raise ValueError("indices and weights must be matching 1-d vectors")
        if self.indices.size < 1:
            raise ValueError("mixture must contain at least one hypothesis")
        if np.any(self.weights < 0) or np.any(self.weights > 1):
            raise ValueError("mixture weights must lie in [0, 1]")
        if abs(float(self.weights.sum()) - 1.0) > SIMPLEX_TOL:
            raise ValueError("mixture weights must sum to 1")

    @classmethod
    def point(cls, index: int) -> "MixtureStrategy":
        return cls(np.array([index]), np.array([1.0]))

    @classmethod
    def uniform(cls, indices: Iterable[int]) -> "MixtureStrategy":
        """Uniform mixture over a (possibly repeating) list of hypotheses.

        Repeats are merged, so the uniform mixture over T returned rounds
        carries weight count/T per distinct hypothesis.
        """
        idx = np.asarray(list(indices), dtype=np.int64)
        if idx.size < 1:
            raise ValueError("mixture must contain at least one hypothesis")
        uniq, counts = np.unique(idx, return_counts=True)
        return cls(uniq, counts / idx.size)

    def dense(self, num_hypotheses: int) -> np.ndarray:
        """Weight per hypothesis row, zero where absent from the mixture."""
        alpha = np.zeros(num_hypotheses)
        np.add.at(alpha, self.indices, self.weights)
        return alpha


def point_loss(hclass: HypothesisClass, h: int, z: int, y, kind: LossKind) -> float:
    """Loss of hypothesis h on corrupted input z against label y.

    Zero-one is the mismatch indicator; L1 and L2 are |h(z)-y| and
    (h(z)-y)^2 with predictions and labels in [0, 1], so every loss lies in
    [0, 1].
    """
    pred = hclass.table[h, z]
    if kind is LossKind.ZERO_ONE:
        if hclass.kind != CATEGORICAL:
            raise ValueError("zero-one loss requires a categorical hypothesis class")
        return float(pred != int(y))
    if hclass.kind != REAL:
        raise ValueError(f"{kind.value} loss requires a real hypothesis class")
    y = float(y)
    if not 0.0 <= y <= 1.0:
        raise ValueError("real labels must lie in [0, 1]")
    diff = abs(float(pred) - y)
    return diff if kind is LossKind.L1 else diff * diff


def _losses_at(hclass: HypothesisClass, z_indices: np.ndarray, labels: np.ndarray,
               kind: LossKind) -> np.ndarray:
    """Loss matrix of shape (num hypotheses, num pairs) for (z, y) pairs."""
    preds = hclass.table[:, z_indices]
    if kind is LossKind.ZERO_ONE:
        if hclass.kind != CATEGORICAL:
            raise ValueError("zero-one loss requires a categorical hypothesis class")
        return (preds != labels.astype(np.int64)[None, :]).astype(np.float64)
    if hclass.kind != REAL:
        raise ValueError(f"{kind.value} loss requires a real hypothesis class")
    diff = np.abs(preds - labels[None, :])
    return diff if kind is LossKind.L1 else diff * diff


def padded_loss_tensor(
    xs: np.ndarray,
    labels: np.ndarray,
    rho: CorruptionMap,
    hclass: HypothesisClass,
    kind: LossKind,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-example loss tensor over corruption slots.

    Returns ``(losses, valid, z_slots)`` where ``losses[h, i, j]`` is the loss
    of hypothesis h on the j-th corruption of example i, ``valid[i, j]`` marks
    slots inside rho(x_i) (padded slots carry loss 0), and ``z_slots[i, j]``
    is the corrupted index, padded with -1.
    """
    n = xs.size
    width = max(len(rho.lists[int(x)]) for x in xs)
    z_slots = np.full((n, width), -1, dtype=np.int64)
    valid = np.zeros((n, width), dtype=bool)
    for i, x in enumerate(xs):
        row = rho.lists[int(x)]
        z_slots[i, : len(row)] = row
        valid[i, : len(row)] = True
    flat = np.where(valid, z_slots, 0).reshape(-1)
    losses = _losses_at(hclass, flat, np.repeat(labels, width), kind)
    losses = losses.reshape(hclass.size, n, width)
    losses = losses * valid[None, :, :]
    return losses, valid, z_slots


def mixture_loss(hclass: HypothesisClass, mixture: MixtureStrategy, z: int, y,
                 kind: LossKind) -> float:
    """Convex combination of point losses at a single (z, y)."""
    total = 0.0
    for h, w in zip(mixture.indices, mixture.weights):
        total += float(w) * point_loss(hclass, int(h), z, y, kind)
    return total


def empirical_risk(
    mixture: MixtureStrategy,
    sample: LabeledSample,
    rho: CorruptionMap,
    hclass: HypothesisClass,
    kind: LossKind,
) -> float:
    """Mean over the sample of the worst-case-over-rho(x) mixture loss."""
    losses, valid, _ = padded_loss_tensor(sample.x_indices, sample.labels, rho, hclass, kind)
    alpha = mixture.dense(hclass.size)
    mixed = np.einsum("h,hij->ij", alpha, losses)
    mixed = np.where(valid, mixed, -np.inf)
    return float(mixed.max(axis=1).mean())


def true_risk(
    mixture: MixtureStrategy,
    dist: Distribution,
    concept: Concept,
    rho: CorruptionMap,
    hclass: HypothesisClass,
    kind: LossKind,
) -> float:
    """Exact expected worst-case mixture loss under the clean distribution.

    Computed by direct summation over the finite clean domain; no sampling.
    """
    xs = np.arange(dist.size, dtype=np.int64)
    losses, valid, _ = padded_loss_tensor(xs, concept.labels, rho, hclass, kind)
    alpha = mixture.dense(hclass.size)
    mixed = np.einsum("h,hij->ij", alpha, losses)
    mixed = np.where(valid, mixed, -np.inf)
    return float(np.dot(dist.weights, mixed.max(axis=1)))
