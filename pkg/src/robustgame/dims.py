"""Pattern classes over finite point sets and exhaustive combinatorial dimensions.

A pattern class is a finite set of value vectors over m points: binary (+/-1),
categorical (label indices), ternary (+/-gamma with unresolved cells), or real
(values in [-1, 1]).  All dimension calculators here are exhaustive searches
with the standard level-wise pruning: shatterability is downward closed, so
level d+1 candidates are one-point extensions of level-d shattered sets whose
other d-subsets were shattered too.

Shattering checks run on row bitmasks.  A point contributes a pair of masks
(rows counted as "high", rows counted as "low"); a subset is shattered when
the induced binary tree of mask intersections has no empty branch, i.e. every
sign pattern is realized by some row.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .hypotheses import HypothesisClass, LossKind, _losses_at
from .model import GameInstance, LabeledSample

BINARY = "binary"
CATEGORICAL = "categorical"
TERNARY = "ternary"
REAL = "real"

VC_GUARD = 24
MULTICLASS_GUARD = 20
FAT_GUARD = 18
COMPOSE_GUARD = 10**6

_EPS = 1e-12


@dataclass(frozen=True)
class PatternClass:
    """Finite function class restricted to m points, as a deduplicated table.

    ``kind`` fixes the cell alphabet: binary cells are +/-1, categorical cells
    are labels in {0..num_labels-1}, ternary cells are codes {-1, 0, +1} where
    0 marks an unresolved cell at scale ``gamma``, real cells lie in [-1, 1].
    """

    patterns: np.ndarray
    kind: str
    gamma: float | None = None
    num_labels: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.patterns)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("patterns must form a nonempty 2-d table")
        if self.kind == BINARY:
            arr = arr.astype(np.int8)
            if not np.isin(arr, (-1, 1)).all():
                raise ValueError("binary patterns must take values -1/+1")
        elif self.kind == TERNARY:
            arr = arr.astype(np.int8)
            if not np.isin(arr, (-1, 0, 1)).all():
                raise ValueError("ternary patterns must take codes -1/0/+1")
            if self.gamma is None or self.gamma <= 0:
                raise ValueError("ternary patterns need a positive scale gamma")
        elif self.kind == CATEGORICAL:
            arr = arr.astype(np.int64)
            if arr.min() < 0:
                raise ValueError("categorical patterns must be nonnegative")
            if self.num_labels is None:
                object.__setattr__(self, "num_labels", int(arr.max()) + 1)
            elif arr.max() >= self.num_labels:
                raise ValueError("categorical patterns exceed num_labels")
        elif self.kind == REAL:
            arr = arr.astype(np.float64)
            if arr.min() < -1.0 - 1e-9 or arr.max() > 1.0 + 1e-9:
                raise ValueError("real patterns must lie in [-1, 1]")
        else:
            raise ValueError(f"unknown pattern kind {self.kind!r}")
        arr = np.unique(arr, axis=0)
        arr.setflags(write=False)
        object.__setattr__(self, "patterns", arr)

    @property
    def size(self) -> int:
        return int(self.patterns.shape[0])

    @property
    def num_points(self) -> int:
        return int(self.patterns.shape[1])

    def restricted(self, points) -> "PatternClass":
        return PatternClass(
            self.patterns[:, list(points)], self.kind, self.gamma, self.num_labels
        )

    def to_json(self) -> dict:
        doc: dict = {"kind": self.kind, "patterns": self.patterns.tolist()}
        if self.gamma is not None:
            doc["gamma"] = self.gamma
        if self.num_labels is not None:
            doc["num_labels"] = self.num_labels
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "PatternClass":
        return cls(
            np.asarray(doc["patterns"]),
            doc["kind"],
            gamma=doc.get("gamma"),
            num_labels=doc.get("num_labels"),
        )

    @classmethod
    def binary(cls, patterns) -> "PatternClass":
        return cls(np.asarray(patterns), BINARY)

    @classmethod
    def binary_from_indicators(cls, indicators) -> "PatternClass":
        """Embed 0/1 indicator patterns as -1/+1."""
        arr = np.asarray(indicators)
        return cls(np.where(arr > 0.5, 1, -1).astype(np.int8), BINARY)

    @classmethod
    def categorical(cls, patterns, num_labels: int | None = None) -> "PatternClass":
        return cls(np.asarray(patterns), CATEGORICAL, num_labels=num_labels)

    @classmethod
    def ternary(cls, codes, gamma: float) -> "PatternClass":
        return cls(np.asarray(codes), TERNARY, gamma=gamma)

    @classmethod
    def real(cls, patterns) -> "PatternClass":
        return cls(np.asarray(patterns), REAL)


@dataclass(frozen=True)
class DimensionReport:
    """A dimension value together with a re-checkable witness."""

    measure: str
    dimension: int
    witness_points: tuple[int, ...]
    gamma: float | None = None
    witness_shift: tuple[float, ...] | None = None
    witness_labels: tuple | None = None


# ---------------------------------------------------------------------------
# Bitmask plumbing


def _mask(bools: np.ndarray) -> int:
    return int.from_bytes(np.packbits(bools, bitorder="little").tobytes(), "little")


def _covers(levels: list[tuple[int, int]], rows: int) -> bool:
    """True when every +/- sign pattern over the level masks hits a row."""
    if not levels:
        return rows != 0
    high, low = levels[0]
    rest = levels[1:]
    ra = rows & high
    if not ra:
        return False
    rb = rows & low
    if not rb:
        return False
    return _covers(rest, ra) and _covers(rest, rb)


def _largest_witnessed(num_points: int, check):
    """Level-wise search for the largest subset accepted by ``check``.

    ``check(subset)`` returns a witness payload or None.  The returned witness
    set is the lexicographically smallest one at the deepest level, so results
    are deterministic regardless of any internal parallelism in ``check``.
    """
    level: dict[tuple[int, ...], object] = {(): check(())}
    if level[()] is None:
        raise AssertionError("the empty set must always be shattered")
    while True:
        prev = set(level.keys())
        next_level: dict[tuple[int, ...], object] = {}
        for subset in sorted(level.keys()):
            start = subset[-1] + 1 if subset else 0
            for j in range(start, num_points):
                cand = subset + (j,)
                if any(
                    cand[:i] + cand[i + 1 :] not in prev for i in range(len(cand) - 1)
                ):
                    continue
                payload = check(cand)
                if payload is not None:
                    next_level[cand] = payload
        if not next_level:
            break
        level = next_level
    witness = min(level.keys())
    return len(witness), witness, level[witness]


def _sign_masks(cls: PatternClass) -> list[tuple[int, int]]:
    """Per point: (rows at +1, rows at -1); ternary zeros fall in neither."""
    out = []
    for col in range(cls.num_points):
        vals = cls.patterns[:, col]
        out.append((_mask(vals == 1), _mask(vals == -1)))
    return out


# ---------------------------------------------------------------------------
# Binary and ternary shattering


def vc_dim(cls: PatternClass) -> DimensionReport:
    """Largest shattered subset of a binary class.

    Ternary classes are accepted too; their unresolved cells count for
    neither sign, so a set is shattered only by fully resolved restrictions.
    """
    if cls.kind not in (BINARY, TERNARY):
        raise ValueError("vc_dim needs a binary (or ternary) pattern class")
    if cls.num_points > VC_GUARD:
        raise ValueError(f"vc_dim guard: {cls.num_points} points > {VC_GUARD}")
    masks = _sign_masks(cls)
    rows = (1 << cls.size) - 1

    def check(subset):
        return True if _covers([masks[i] for i in subset], rows) else None

    dim, witness, _ = _largest_witnessed(cls.num_points, check)
    return DimensionReport(measure="vc", dimension=dim, witness_points=witness)


def growth_function(cls: PatternClass, m: int) -> int:
    """Maximum number of distinct restrictions over any m-point subset."""
    if cls.kind != BINARY:
        raise ValueError("growth_function needs a binary pattern class")
    if not 0 <= m <= cls.num_points:
        raise ValueError("m must lie in [0, number of points]")
    if m == 0:
        return 1
    best = 0
    for subset in itertools.combinations(range(cls.num_points), m):
        distinct = np.unique(cls.patterns[:, subset], axis=0).shape[0]
        best = max(best, int(distinct))
        if best == 2**m:
            break
    return best


# ---------------------------------------------------------------------------
# Multiclass shattering


def _attained_masks(cls: PatternClass) -> list[dict[int, int]]:
    out = []
    for col in range(cls.num_points):
        vals = cls.patterns[:, col]
        out.append({int(v): _mask(vals == v) for v in np.unique(vals)})
    return out


def graph_dim(cls: PatternClass) -> DimensionReport:
    """Largest set shattered in the agree/disagree sense.

    The witness labeling is searched per point over the values the class
    actually attains there; a value never attained can satisfy no agreement
    constraint.
    """
    if cls.kind != CATEGORICAL:
        raise ValueError("graph_dim needs a categorical pattern class")
    if cls.num_points > MULTICLASS_GUARD:
        raise ValueError(f"graph_dim guard: {cls.num_points} points > {MULTICLASS_GUARD}")
    attained = _attained_masks(cls)
    rows = (1 << cls.size) - 1

    def check(subset):
        choices = [sorted(attained[i].items()) for i in subset]
        for combo in itertools.product(*choices):
            levels = [(eq, rows & ~eq) for _, eq in combo]
            if _covers(levels, rows):
                return tuple(v for v, _ in combo)
        return None

    dim, witness, labels = _largest_witnessed(cls.num_points, check)
    return DimensionReport(
        measure="graph", dimension=dim, witness_points=witness, witness_labels=labels
    )


def natarajan_dim(cls: PatternClass) -> DimensionReport:
    """Largest set shattered between two pointwise-distinct labelings."""
    if cls.kind != CATEGORICAL:
        raise ValueError("natarajan_dim needs a categorical pattern class")
    if cls.num_points > MULTICLASS_GUARD:
        raise ValueError(
            f"natarajan_dim guard: {cls.num_points} points > {MULTICLASS_GUARD}"
        )
    attained = _attained_masks(cls)
    rows = (1 << cls.size) - 1

    def check(subset):
        per_point = []
        for i in subset:
            items = sorted(attained[i].items())
            per_point.append(
                [
                    ((v1, m1), (v2, m2))
                    for (v1, m1), (v2, m2) in itertools.combinations(items, 2)
                ]
            )
        for combo in itertools.product(*per_point):
            levels = [(m1, m2) for (_, m1), (_, m2) in combo]
            if _covers(levels, rows):
                f1 = tuple(v1 for (v1, _), _ in combo)
                f2 = tuple(v2 for _, (v2, _) in combo)
                return (f1, f2)
        return None

    dim, witness, labels = _largest_witnessed(cls.num_points, check)
    return DimensionReport(
        measure="natarajan", dimension=dim, witness_points=witness, witness_labels=labels
    )


# ---------------------------------------------------------------------------
# Fat shattering


def shift_candidates(values: np.ndarray, gamma: float) -> list[float]:
    """Candidate shifts at one point: every attained value +/- gamma, the
    midpoints of consecutive candidates, and one sentinel on each side.

    Row membership in "high" (v >= r + gamma) or "low" (v <= r - gamma) can
    only change when r crosses an attained value +/- gamma, so this grid
    realizes every achievable high/low split.
    """
    crit = np.unique(
        np.concatenate([np.asarray(values) - gamma, np.asarray(values) + gamma])
    )
    grid = [float(crit[0]) - 1.0]
    for a, b in zip(crit[:-1], crit[1:]):
        grid.append(float(a))
        grid.append(float(a + b) / 2.0)
    grid.append(float(crit[-1]))
    grid.append(float(crit[-1]) + 1.0)
    return grid


def _shift_options(cls: PatternClass, gamma: float) -> list[list[tuple[int, int, float]]]:
    options = []
    for col in range(cls.num_points):
        vals = cls.patterns[:, col]
        seen: set[tuple[int, int]] = set()
        opts = []
        for r in shift_candidates(vals, gamma):
            high = _mask(vals >= r + gamma - _EPS)
            low = _mask(vals <= r - gamma + _EPS)
            if not high or not low:
                continue
            key = (high, low)
            if key not in seen:
                seen.add(key)
                opts.append((high, low, r))
        options.append(opts)
    return options


def _cover_with_shift_choices(options, rows: int):
    """Pick one shift per point so the sign-pattern tree has no empty branch.

    The shift choice at a point is shared by every branch, so the search
    carries the full list of branch masks down the recursion.
    """
    chosen: list[float] = []

    def dfs(idx: int, branch_masks: list[int]) -> bool:
        if idx == len(options):
            return True
        for high, low, r in options[idx]:
            new_masks = []
            for msk in branch_masks:
                ma = msk & high
                if not ma:
                    break
                mb = msk & low
                if not mb:
                    break
                new_masks.append(ma)
                new_masks.append(mb)
            else:
                chosen.append(r)
                if dfs(idx + 1, new_masks):
                    return True
                chosen.pop()
        return False

    return tuple(chosen) if dfs(0, [rows]) else None


def fat_shattering_dim(cls: PatternClass, gamma: float) -> DimensionReport:
    """Largest set shattered with margin gamma around some per-point shift."""
    if cls.kind != REAL:
        raise ValueError("fat_shattering_dim needs a real pattern class")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if cls.num_points > FAT_GUARD:
        raise ValueError(f"fat_shattering_dim guard: {cls.num_points} points > {FAT_GUARD}")
    options = _shift_options(cls, gamma)
    rows = (1 << cls.size) - 1

    def check(subset):
        return _cover_with_shift_choices([options[i] for i in subset], rows)

    dim, witness, shift = _largest_witnessed(cls.num_points, check)
    return DimensionReport(
        measure="fat",
        dimension=dim,
        witness_points=witness,
        gamma=gamma,
        witness_shift=shift,
    )


def fat_shattering_dim_at_zero(cls: PatternClass, gamma: float) -> DimensionReport:
    """Fat shattering with the shift pinned to the zero vector."""
    if cls.kind != REAL:
        raise ValueError("fat_shattering_dim_at_zero needs a real pattern class")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if cls.num_points > FAT_GUARD:
        raise ValueError(
            f"fat_shattering_dim_at_zero guard: {cls.num_points} points > {FAT_GUARD}"
        )
    levels_all = []
    for col in range(cls.num_points):
        vals = cls.patterns[:, col]
        levels_all.append((_mask(vals >= gamma - _EPS), _mask(vals <= -gamma + _EPS)))
    rows = (1 << cls.size) - 1

    def check(subset):
        return True if _covers([levels_all[i] for i in subset], rows) else None

    dim, witness, _ = _largest_witnessed(cls.num_points, check)
    return DimensionReport(
        measure="fat-zero",
        dimension=dim,
        witness_points=witness,
        gamma=gamma,
        witness_shift=tuple(0.0 for _ in witness),
    )


def verify_report(cls: PatternClass, report: DimensionReport) -> bool:
    """Re-check a witness by direct pattern lookup."""
    pts = list(report.witness_points)
    sub = cls.patterns[:, pts]
    d = report.dimension
    if len(pts) != d:
        return False
    if report.measure == "vc":
        if cls.kind == TERNARY:
            resolved = sub[(sub != 0).all(axis=1)]
            distinct = np.unique(resolved, axis=0).shape[0] if resolved.size else (1 if d == 0 else 0)
        else:
            distinct = np.unique(sub, axis=0).shape[0]
        return int(distinct) >= 2**d if d else True
    if report.measure == "graph":
        f = np.asarray(report.witness_labels, dtype=sub.dtype)
        signatures = {tuple(row) for row in (sub == f)}
        return len(signatures) == 2**d
    if report.measure == "natarajan":
        f1 = np.asarray(report.witness_labels[0], dtype=sub.dtype)
        f2 = np.asarray(report.witness_labels[1], dtype=sub.dtype)
        if d and not (f1 != f2).all():
            return False
        valid = (sub == f1) | (sub == f2)
        signatures = {tuple(row) for row, ok in zip(sub == f1, valid.all(axis=1)) if ok}
        return len(signatures) == 2**d
    if report.measure in ("fat", "fat-zero"):
        r = np.asarray(report.witness_shift, dtype=np.float64)
        high = sub >= r + report.gamma - _EPS
        low = sub <= r - report.gamma + _EPS
        needed = set(itertools.product((False, True), repeat=d))
        realized = set()
        for hi, lo in zip(high, low):
            for pattern in needed:
                if all((hi[t] if want else lo[t]) for t, want in enumerate(pattern)):
                    realized.add(pattern)
        return needed <= realized
    raise ValueError(f"unknown measure {report.measure!r}")


# ---------------------------------------------------------------------------
# Class operators


def pointwise_compose(classes: list[PatternClass], op: str = "max") -> PatternClass:
    """Pointwise max/and/or over one pattern from each class.

    The composition is built pairwise with intermediate deduplication, which
    keeps memory bounded while producing the same set as the full product.
    """
    if not classes:
        raise ValueError("need at least one pattern class")
    m = classes[0].num_points
    if any(c.num_points != m for c in classes):
        raise ValueError("classes must share the same point set")
    kinds = {c.kind for c in classes}
    if op == "max":
        if not kinds <= {BINARY, REAL}:
            raise ValueError("pointwise max needs binary or real classes")
        if len(kinds) > 1:
            raise ValueError("cannot mix binary and real classes")
    else:
        if op not in ("and", "or"):
            raise ValueError(f"unknown composition {op!r}")
        if kinds != {BINARY}:
            raise ValueError(f"pointwise {op} needs binary classes")
    total = 1
    for c in classes:
        total *= c.size
    if total > COMPOSE_GUARD:
        raise ValueError(f"composition guard: product of sizes {total} > {COMPOSE_GUARD}")

    reduce = np.minimum if op == "and" else np.maximum
    combined = classes[0].patterns
    for c in classes[1:]:
        combined = reduce(combined[:, None, :], c.patterns[None, :, :]).reshape(-1, m)
        combined = np.unique(combined, axis=0)
    kind = classes[0].kind
    return PatternClass(combined, kind)


def pointwise_max_class(classes: list[PatternClass]) -> PatternClass:
    """Pointwise maximum over one pattern from each class."""
    return pointwise_compose(classes, "max")


def slot_loss_class(instance: GameInstance, slot: int) -> PatternClass:
    """Loss patterns over the sample when the adversary always plays the
    corruption at a fixed list position.

    Examples whose list is shorter than ``slot+1`` repeat their last entry,
    which leaves the slot-wise maximum unchanged.  Zero-one losses come back
    as a binary class (loss 1 -> +1), real losses as a real class.
    """
    widths = [len(instance.rho.lists[int(x)]) for x in instance.sample.x_indices]
    if not 0 <= slot < max(
        len(row) for row in instance.rho.lists
    ):
        raise ValueError("slot must index into the widest corruption list")
    zs = np.asarray(
        [
            instance.rho.lists[int(x)][min(slot, w - 1)]
            for x, w in zip(instance.sample.x_indices, widths)
        ],
        dtype=np.int64,
    )
    losses = _losses_at(instance.hypotheses, zs, instance.sample.labels, instance.loss)
    if instance.loss is LossKind.ZERO_ONE:
        return PatternClass.binary_from_indicators(losses)
    return PatternClass.real(losses)


def loss_pattern_class(
    hclass: HypothesisClass, pairs: LabeledSample, kind: LossKind
) -> PatternClass:
    """Per-pair loss patterns, one row per hypothesis.

    The sample's indices are read as corrupted-domain indices here: the loss
    class lives on (corrupted input, label) pairs.
    """
    losses = _losses_at(hclass, pairs.x_indices, pairs.labels, kind)
    return PatternClass.real(losses)


@dataclass(frozen=True)
class DerivedClasses:
    difference: PatternClass
    absolute: PatternClass
    square: PatternClass


def derived_classes(cls: PatternClass, labels=None) -> DerivedClasses:
    """The difference (against per-point labels), absolute-value, and square
    transforms of a real class."""
    if cls.kind != REAL:
        raise ValueError("derived_classes needs a real pattern class")
    if labels is None:
        labels = np.zeros(cls.num_points)
    labels = np.asarray(labels, dtype=np.float64)
    if labels.shape != (cls.num_points,):
        raise ValueError("labels must assign one value per point")
    return DerivedClasses(
        difference=PatternClass.real(cls.patterns - labels[None, :]),
        absolute=PatternClass.real(np.abs(cls.patterns)),
        square=PatternClass.real(cls.patterns**2),
    )


# ---------------------------------------------------------------------------
# Disambiguation


def _ternary_vc_value(codes: np.ndarray) -> int:
    masks = []
    for col in range(codes.shape[1]):
        vals = codes[:, col]
        masks.append((_mask(vals == 1), _mask(vals == -1)))
    rows = (1 << codes.shape[0]) - 1

    def check(subset):
        return True if _covers([masks[i] for i in subset], rows) else None

    dim, _, _ = _largest_witnessed(codes.shape[1], check)
    return dim


def _shatters_above_through(codes: np.ndarray, d: int, col: int) -> bool:
    """Whether some (d+1)-subset containing ``col`` is fully shattered.

    After flipping one cell in ``col`` of a state with no shattered
    (d+1)-subset, only subsets through that column can newly shatter, so this
    is the full validity check for one backtracking step.
    """
    m = codes.shape[1]
    if d + 1 > m:
        return False
    masks = []
    for c in range(m):
        vals = codes[:, c]
        masks.append((_mask(vals == 1), _mask(vals == -1)))
    rows = (1 << codes.shape[0]) - 1
    others = [c for c in range(m) if c != col]
    for rest in itertools.combinations(others, d):
        if _covers([masks[c] for c in sorted(rest + (col,))], rows):
            return True
    return False


_DISAMBIGUATE_BUDGET = 2_000_000


def disambiguate(cls: PatternClass) -> PatternClass:
    """Resolve every unresolved ternary cell to +/- without increasing the
    shattering dimension.

    Cells are resolved in row-major order, trying each sign and keeping the
    exhaustively checked dimension from growing.  A purely greedy per-cell
    pass can paint itself into a corner (states exist where both signs for
    one cell create a newly shattered set), so dead ends backtrack over
    earlier sign choices.  RuntimeError means the search proved no
    dimension-preserving resolution exists, or the search budget ran out.
    """
    if cls.kind != TERNARY:
        raise ValueError("disambiguate needs a ternary pattern class")
    if cls.num_points > FAT_GUARD:
        raise ValueError(f"disambiguate guard: {cls.num_points} points > {FAT_GUARD}")
    codes = cls.patterns.astype(np.int8).copy()
    bound = _ternary_vc_value(codes)
    stars = list(zip(*np.nonzero(codes == 0)))
    checks = 0

    def settle(idx: int) -> bool:
        nonlocal checks
        if idx == len(stars):
            return True
        row, col = stars[idx]
        for sign in (1, -1):
            checks += 1
            if checks > _DISAMBIGUATE_BUDGET:
                raise RuntimeError("disambiguation search budget exceeded")
            codes[row, col] = sign
            if not _shatters_above_through(codes, bound, int(col)) and settle(idx + 1):
                return True
        codes[row, col] = 0
        return False

    if not settle(0):
        raise RuntimeError(
            "no dimension-preserving resolution exists for this class"
        )
    return PatternClass.binary(codes)
