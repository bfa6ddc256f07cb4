"""Finite-domain model objects: domains, distributions, corruption maps, concepts, samples.

Everything is index-based: a domain is ``{0, ..., size-1}`` and all semantic
payloads (probabilities, corruption lists, labels, predictions) live in tables
keyed by index.  All objects are immutable after construction and safe to
share across threads.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

SIMPLEX_TOL = 1e-9

CATEGORICAL = "categorical"
REAL = "real"


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FiniteDomain:
    """The index set {0, ..., size-1}."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"domain size must be >= 1, got {self.size}")


@dataclass(frozen=True)
class Distribution:
    """A probability vector over a finite domain.

    Weights must be nonnegative and sum to 1 within ``SIMPLEX_TOL``.  Inputs
    are never renormalized silently; use :meth:`renormalized` for that.
    """

    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen_array(self.weights, np.float64))
        if self.weights.ndim != 1 or self.weights.size < 1:
            raise ValueError("weights must be a nonempty 1-d vector")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        total = float(self.weights.sum())
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")

    @property
    def size(self) -> int:
        return int(self.weights.size)

    @classmethod
    def uniform(cls, size: int) -> "Distribution":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, size: int, index: int) -> "Distribution":
        w = np.zeros(size)
        w[index] = 1.0
        return cls(w)

    @classmethod
    def renormalized(cls, raw: Sequence[float]) -> "Distribution":
        """Explicitly rescale nonnegative raw weights onto the simplex."""
        arr = np.asarray(raw, dtype=np.float64)
        total = arr.sum()
        if total <= 0:
            raise ValueError("cannot renormalize weights with nonpositive total")
        return cls(arr / total)


@dataclass(frozen=True)
class CorruptionMap:
    """For every clean input x, the ordered list of corrupted indices the
    adversary may substitute.

    Lists are nonempty, have length at most ``budget``, and index into the
    corrupted domain.  The order is stable: position j in a list is
    meaningful to the slot-restricted loss classes.
    """

    lists: tuple[tuple[int, ...], ...]
    budget: int
    corrupted_size: int

    def __post_init__(self):
        object.__setattr__(
            self, "lists", tuple(tuple(int(z) for z in row) for row in self.lists)
        )
        if self.budget < 1:
            raise ValueError("corruption budget must be >= 1")
        for x, row in enumerate(self.lists):
            if not row:
                raise ValueError(f"rho({x}) is empty")
            if len(row) > self.budget:
                raise ValueError(f"rho({x}) has {len(row)} entries, budget is {self.budget}")
            for z in row:
                if not 0 <= z < self.corrupted_size:
                    raise ValueError(f"rho({x}) contains invalid corrupted index {z}")

    @property
    def clean_size(self) -> int:
        return len(self.lists)

    def max_width(self) -> int:
        return max(len(row) for row in self.lists)

    @classmethod
    def identity(cls, size: int, budget: int = 1) -> "CorruptionMap":
        """The no-op map rho(x) = [x]."""
        return cls(tuple((x,) for x in range(size)), budget, size)


@dataclass(frozen=True)
class Concept:
    """The target labeling of the clean domain.

    Categorical labels are integers in {0, ..., num_labels-1}; real labels
    live in [0, 1] and are clamped there at construction (bounded-loss
    convention with unit scale).
    """

    kind: str
    labels: np.ndarray
    num_labels: int | None = None

    def __post_init__(self):
        if self.kind == CATEGORICAL:
            labels = _frozen_array(self.labels, np.int64)
            if self.num_labels is None:
                object.__setattr__(self, "num_labels", int(labels.max()) + 1 if labels.size else 1)
            if np.any(labels < 0) or np.any(labels >= self.num_labels):
                raise ValueError("categorical labels out of range")
        elif self.kind == REAL:
            labels = _frozen_array(np.clip(self.labels, 0.0, 1.0), np.float64)
        else:
            raise ValueError(f"unknown concept kind {self.kind!r}")
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return int(self.labels.size)

    def label_of(self, x: int):
        v = self.labels[x]
        return int(v) if self.kind == CATEGORICAL else float(v)


@dataclass(frozen=True)
class LabeledSample:
    """An ordered list of (clean index, label) pairs."""

    x_indices: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x_indices", _frozen_array(self.x_indices, np.int64))
        object.__setattr__(self, "labels", _frozen_array(self.labels, np.float64))
        if self.x_indices.ndim != 1 or self.x_indices.size < 1:
            raise ValueError("sample must be a nonempty index vector")
        if self.labels.shape != self.x_indices.shape:
            raise ValueError("labels and indices must have equal length")

    def __len__(self) -> int:
        return int(self.x_indices.size)

    def pairs(self) -> list[tuple[int, float]]:
        return [(int(x), float(y)) for x, y in zip(self.x_indices, self.labels)]


def draw_sample(dist: Distribution, concept: Concept, m: int, seed: int) -> LabeledSample:
    """Draw m i.i.d. clean inputs from ``dist`` and label them by ``concept``.

    Pure function of its arguments: the same (dist, concept, m, seed) always
    produces the same sample.  The seed is mandatory.
    """
    if m < 1:
        raise ValueError("sample size must be >= 1")
    if concept.size != dist.size:
        raise ValueError("concept and distribution cover different domains")
    rng = np.random.default_rng(seed)
    xs = rng.choice(dist.size, size=m, p=dist.weights)
    return LabeledSample(xs, concept.labels[xs])


@dataclass(frozen=True)
class GameInstance:
    """One playable corruption game.

    Bundles the clean/corrupted domains, the corruption map, the clean-input
    distribution, the target concept, a labeled training sample, a hypothesis
    class over corrupted inputs, and the loss kind.  The hypothesis class is
    kept loosely typed here (see :mod:`robustgame.hypotheses`) so the model
    layer stays free of loss semantics.
    """

    clean: FiniteDomain
    corrupted: FiniteDomain
    rho: CorruptionMap
    dist: Distribution
    concept: Concept
    sample: LabeledSample
    hypotheses: "object"
    loss: "object"

    @property
    def budget(self) -> int:
        return self.rho.budget

    def to_json(self) -> dict:
        from .hypotheses import HypothesisClass, LossKind

        assert isinstance(self.hypotheses, HypothesisClass)
        concept = {"kind": self.concept.kind, "labels": _jsonable(self.concept.labels)}
        if self.concept.kind == CATEGORICAL:
            concept["num_labels"] = self.concept.num_labels
        return {
            "X": self.clean.size,
            "Z": self.corrupted.size,
            "k": self.rho.budget,
            "rho": [list(row) for row in self.rho.lists],
            "concept": concept,
            "dist": _jsonable(self.dist.weights),
            "sample": [[x, y] for x, y in self.sample.pairs()],
            "hypotheses": [_jsonable(row) for row in self.hypotheses.table],
            "loss": self.loss.value if isinstance(self.loss, LossKind) else str(self.loss),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GameInstance":
        from .hypotheses import HypothesisClass, LossKind

        clean = FiniteDomain(int(doc["X"]))
        corrupted = FiniteDomain(int(doc["Z"]))
        rho = CorruptionMap(
            tuple(tuple(row) for row in doc["rho"]), int(doc["k"]), corrupted.size
        )
        concept_doc = doc["concept"]
        concept = Concept(
            concept_doc["kind"],
            concept_doc["labels"],
            concept_doc.get("num_labels"),
        )
        dist = Distribution(doc["dist"])
        pairs = doc["sample"]
        sample = LabeledSample([p[0] for p in pairs], [p[1] for p in pairs])
        loss = LossKind(doc["loss"])
        hypotheses = HypothesisClass.for_loss(doc["hypotheses"], loss, concept.num_labels)
        return cls(clean, corrupted, rho, dist, concept, sample, hypotheses, loss)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2))

    @classmethod
    def load(cls, path: str | Path) -> "GameInstance":
        return cls.from_json(json.loads(Path(path).read_text()))


def _jsonable(arr: np.ndarray) -> list:
    if np.issubdtype(arr.dtype, np.integer):
        return [int(v) for v in arr]
    return [float(v) for v in arr]


def validate_document(doc: dict) -> list[str]:
    """Collect every invariant violation in a serialized instance document.

    Unlike the typed constructors this never raises on bad values; it is the
    gate for untrusted documents, so all violations are reported together.
    """
    violations: list[str] = []
    try:
        n_clean = int(doc["X"])
        n_corrupt = int(doc["Z"])
        budget = int(doc["k"])
    except (KeyError, TypeError, ValueError) as err:
        return [f"missing or malformed domain sizes: {err}"]
    if n_clean < 1 or n_corrupt < 1:
        violations.append("domain sizes must be >= 1")
    if budget < 1:
        violations.append("corruption budget must be >= 1")

    dist = np.asarray(doc.get("dist", []), dtype=np.float64)
    if dist.size != n_clean:
        violations.append(f"distribution covers {dist.size} points, expected {n_clean}")
    if dist.size and np.any(dist < 0):
        violations.append("distribution has negative weights")
    if dist.size and abs(float(dist.sum()) - 1.0) > SIMPLEX_TOL:
        violations.append("distribution not normalized")

    rho = doc.get("rho", [])
    if len(rho) != n_clean:
        violations.append(f"rho covers {len(rho)} points, expected {n_clean}")
    for x, row in enumerate(rho):
        if not row:
            violations.append(f"rho({x}) is empty")
        if len(row) > budget:
            violations.append(f"rho({x}) has {len(row)} entries, budget is {budget}")
        for z in row:
            if not 0 <= int(z) < n_corrupt:
                violations.append(f"rho({x}) references invalid corrupted index {z}")

    concept = doc.get("concept", {})
    kind = concept.get("kind")
    labels = np.asarray(concept.get("labels", []), dtype=np.float64)
    if kind not in (CATEGORICAL, REAL):
        violations.append(f"unknown concept kind {kind!r}")
    if labels.size != n_clean:
        violations.append(f"concept labels {labels.size} points, expected {n_clean}")
    if kind == REAL and labels.size and (labels.min() < 0 or labels.max() > 1):
        violations.append("real concept labels outside [0, 1]")
    num_labels = concept.get("num_labels")
    if kind == CATEGORICAL and labels.size:
        top = int(labels.max())
        if num_labels is not None and top >= int(num_labels):
            violations.append("categorical labels exceed num_labels")

    sample = doc.get("sample", [])
    if not sample:
        violations.append("sample is empty")
    for i, pair in enumerate(sample):
        x, y = int(pair[0]), float(pair[1])
        if not 0 <= x < n_clean:
            violations.append(f"sample[{i}] has invalid clean index {x}")
        elif labels.size == n_clean and not np.isclose(y, labels[x], atol=0.0):
            violations.append(f"sample[{i}] label {y} differs from concept({x})")

    table = np.asarray(doc.get("hypotheses", []), dtype=np.float64)
    if table.ndim != 2 or table.shape[0] < 1:
        violations.append("hypothesis table must be a nonempty 2-d table")
    elif table.shape[1] != n_corrupt:
        violations.append(
            f"hypothesis table has {table.shape[1]} columns, expected {n_corrupt}"
        )
    loss = doc.get("loss")
    if loss not in ("zero-one", "l1", "l2"):
        violations.append(f"unknown loss kind {loss!r}")
    if loss == "zero-one" and kind == REAL:
        violations.append("zero-one loss requires categorical labels")
    if loss in ("l1", "l2") and kind == CATEGORICAL:
        violations.append(f"{loss} loss requires real labels")
    return violations


def validate_instance(instance: GameInstance) -> list[str]:
    """Collect every invariant violation in the instance.

    Violations are returned, never raised; an empty list means the instance
    is well formed.  Because the typed constructors already reject most
    malformed inputs, this is primarily the gate for instances assembled
    field by field or deserialized from untrusted documents.
    """
    from .hypotheses import HypothesisClass, LossKind

    violations: list[str] = []
    n_clean, n_corrupt = instance.clean.size, instance.corrupted.size

    w = instance.dist.weights
    if w.size != n_clean:
        violations.append(f"distribution covers {w.size} points, clean domain has {n_clean}")
    if np.any(w < 0):
        violations.append("distribution has negative weights")
    if abs(float(w.sum()) - 1.0) > SIMPLEX_TOL:
        violations.append("distribution not normalized")

    rho = instance.rho
    if rho.clean_size != n_clean:
        violations.append(f"rho covers {rho.clean_size} points, clean domain has {n_clean}")
    for x, row in enumerate(rho.lists):
        if not row:
            violations.append(f"rho({x}) is empty")
        if len(row) > rho.budget:
            violations.append(f"rho({x}) exceeds budget {rho.budget}")
        for z in row:
            if not 0 <= z < n_corrupt:
                violations.append(f"rho({x}) references invalid corrupted index {z}")

    concept = instance.concept
    if concept.size != n_clean:
        violations.append(f"concept labels {concept.size} points, clean domain has {n_clean}")
    if concept.kind == REAL and (
        np.any(concept.labels < 0) or np.any(concept.labels > 1)
    ):
        violations.append("real concept labels outside [0, 1]")

    sample = instance.sample
    for i, (x, y) in enumerate(sample.pairs()):
        if not 0 <= x < n_clean:
            violations.append(f"sample[{i}] has invalid clean index {x}")
            continue
        if x < rho.clean_size and not rho.lists[x]:
            violations.append(f"sample[{i}] input {x} has no corruption entry")
        expected = concept.label_of(x) if x < concept.size else None
        if expected is not None and not np.isclose(y, expected, atol=0.0):
            violations.append(f"sample[{i}] label {y} differs from concept({x})={expected}")

    hclass = instance.hypotheses
    if isinstance(hclass, HypothesisClass):
        if hclass.num_inputs != n_corrupt:
            violations.append(
                f"hypothesis table has {hclass.num_inputs} columns, corrupted domain has {n_corrupt}"
            )
        kind = instance.loss
        if isinstance(kind, LossKind):
            if kind is LossKind.ZERO_ONE and concept.kind != CATEGORICAL:
                violations.append("zero-one loss requires categorical labels")
            if kind in (LossKind.L1, LossKind.L2) and concept.kind != REAL:
                violations.append(f"{kind.value} loss requires real labels")
            if kind is LossKind.ZERO_ONE and hclass.kind != CATEGORICAL:
                violations.append("zero-one loss requires a categorical hypothesis table")
            if kind in (LossKind.L1, LossKind.L2) and hclass.kind != REAL:
                violations.append(f"{kind.value} loss requires a real hypothesis table")
        if hclass.kind == CATEGORICAL and concept.kind == CATEGORICAL:
            if int(hclass.table.max(initial=0)) >= concept.num_labels:
                violations.append("hypothesis predictions exceed the concept's label range")
    else:
        violations.append("instance has no hypothesis class")

    return violations
