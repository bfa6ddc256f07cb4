"""Scenario generators, end-to-end experiments, and result persistence.

An experiment sweeps (trial, sample size) cells: generate an instance, train
the adversary/learner pair, optionally solve the game exactly, evaluate the
risks, and emit one CSV row per cell plus a JSON summary.  Failed cells
produce error rows instead of aborting the run.  Reruns of the same
configuration reproduce every row bit for bit except wall time.
"""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .exact import exact_game_value
from .game import adversary_guarantee, horizon_for, learner_guarantee, mw_train
from .hypotheses import HypothesisClass, LossKind, empirical_risk, true_risk
from .model import (
    CATEGORICAL,
    REAL,
    Concept,
    CorruptionMap,
    Distribution,
    FiniteDomain,
    GameInstance,
    LabeledSample,
    draw_sample,
    validate_instance,
)

SCENARIOS = (
    "random-binary",
    "random-multiclass",
    "random-regression",
    "thresholds",
    "matching-pennies",
)

CSV_COLUMNS = (
    "trial",
    "sample_size",
    "value",
    "learner_guarantee",
    "adversary_guarantee",
    "true_risk",
    "empirical_risk",
    "gap",
    "rounds",
    "wall_time_s",
    "error",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment sweep.

    ``seed`` is mandatory; the per-trial generator seed is ``seed XOR trial``,
    and per-sample-size draws consume that trial stream in ``sample_sizes``
    order.  ``train_rounds`` overrides the horizon formula; ``solve_exact``
    may be disabled for sweeps whose instances exceed the dense LP guard.
    """

    scenario: str
    seed: int
    num_clean: int = 8
    num_corrupted: int = 8
    num_hypotheses: int = 6
    budget: int = 2
    num_labels: int = 2
    epsilon: float = 0.1
    delta: float = 0.05
    sample_sizes: tuple[int, ...] = (20,)
    trials: int = 5
    loss: str | None = None
    train_rounds: int | None = None
    eta: float | None = None
    solve_exact: bool = True
    make_figures: bool = True
    out_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "sample_sizes", tuple(int(m) for m in self.sample_sizes))
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        for name in ("num_clean", "num_corrupted", "num_hypotheses", "budget",
                     "num_labels", "trials"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.budget > self.num_corrupted:
            raise ValueError("budget cannot exceed the corrupted domain size")
        if not self.sample_sizes or any(m < 1 for m in self.sample_sizes):
            raise ValueError("sample_sizes must be positive")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1]")

    @classmethod
    def from_json(cls, doc: dict) -> "ExperimentConfig":
        return cls(**doc)

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["sample_sizes"] = list(self.sample_sizes)
        return doc


@dataclass(frozen=True)
class ExperimentRow:
    trial: int
    sample_size: int
    value: float
    learner_guarantee: float
    adversary_guarantee: float
    true_risk: float
    empirical_risk: float
    gap: float
    rounds: int
    wall_time_s: float
    error: str = ""


def _loss_kind(cfg: ExperimentConfig) -> LossKind:
    if cfg.loss is not None:
        return LossKind(cfg.loss)
    if cfg.scenario == "random-regression":
        return LossKind.L1
    return LossKind.ZERO_ONE


def matching_pennies_instance(sample_size: int = 1, seed: int = 0) -> GameInstance:
    """The canonical one-example, two-corruption, two-hypothesis game with
    loss matrix [[1, 0], [0, 1]]; its value is 1/2."""
    clean = FiniteDomain(1)
    corrupted = FiniteDomain(2)
    rho = CorruptionMap(((0, 1),), budget=2, corrupted_size=2)
    concept = Concept(CATEGORICAL, [0], num_labels=2)
    dist = Distribution.point_mass(1, 0)
    hclass = HypothesisClass.categorical([[1, 0], [0, 1]], num_labels=2)
    sample = draw_sample(dist, concept, sample_size, seed)
    return GameInstance(
        clean, corrupted, rho, dist, concept, sample, hclass, LossKind.ZERO_ONE
    )


def _random_rho(rng: np.random.Generator, num_clean: int, num_corrupted: int,
                budget: int) -> CorruptionMap:
    lists = []
    for _ in range(num_clean):
        width = int(rng.integers(1, budget + 1))
        lists.append(tuple(int(z) for z in rng.choice(num_corrupted, width, replace=False)))
    return CorruptionMap(tuple(lists), budget, num_corrupted)


def generate_instance(
    cfg: ExperimentConfig, trial: int, sample_size: int | None = None
) -> GameInstance:
    """Deterministic instance for one (config, trial) cell.

    The instance skeleton (domains, corruption map, concept, class,
    distribution) depends only on ``cfg.seed ^ trial``; each entry of
    ``cfg.sample_sizes`` then gets an independent sample seed drawn from that
    stream in order, so every (trial, m) cell is reproducible in isolation.
    """
    if sample_size is None:
        sample_size = cfg.sample_sizes[0]
    rng = np.random.default_rng(cfg.seed ^ trial)
    kind = _loss_kind(cfg)

    if cfg.scenario == "matching-pennies":
        skeleton = matching_pennies_instance()
    elif cfg.scenario == "thresholds":
        size = cfg.num_clean
        clean = FiniteDomain(size)
        corrupted = FiniteDomain(size)
        lists = []
        for x in range(size):
            window = tuple(range(x, min(x + cfg.budget, size)))
            lists.append(window if window else (x,))
        rho = CorruptionMap(tuple(lists), cfg.budget, size)
        cuts = np.arange(size + 1)
        if cfg.num_hypotheses < cuts.size:
            cuts = np.sort(rng.choice(cuts, cfg.num_hypotheses, replace=False))
        table = (np.arange(size)[None, :] >= cuts[:, None]).astype(np.int64)
        hclass = HypothesisClass.categorical(table, num_labels=2)
        target = int(rng.integers(0, size + 1))
        concept = Concept(CATEGORICAL, (np.arange(size) >= target).astype(np.int64), 2)
        dist = Distribution.uniform(size)
        skeleton = GameInstance(
            clean, corrupted, rho, dist, concept,
            draw_sample(dist, concept, 1, 0), hclass, LossKind.ZERO_ONE,
        )
    else:
        clean = FiniteDomain(cfg.num_clean)
        corrupted = FiniteDomain(cfg.num_corrupted)
        rho = _random_rho(rng, cfg.num_clean, cfg.num_corrupted, cfg.budget)
        labels = 2 if cfg.scenario == "random-binary" else cfg.num_labels
        if cfg.scenario == "random-regression":
            concept = Concept(REAL, rng.uniform(0.0, 1.0, cfg.num_clean))
            hclass = HypothesisClass.real(
                rng.uniform(0.0, 1.0, (cfg.num_hypotheses, cfg.num_corrupted))
            )
        else:
            concept = Concept(CATEGORICAL, rng.integers(0, labels, cfg.num_clean), labels)
            hclass = HypothesisClass.categorical(
                rng.integers(0, labels, (cfg.num_hypotheses, cfg.num_corrupted)), labels
            )
        dist = Distribution(rng.dirichlet(np.ones(cfg.num_clean)))
        skeleton = GameInstance(
            clean, corrupted, rho, dist, concept,
            draw_sample(dist, concept, 1, 0), hclass, kind,
        )

    sample_seed = None
    for m in cfg.sample_sizes:
        s = int(rng.integers(np.iinfo(np.int64).max))
        if m == sample_size and sample_seed is None:
            sample_seed = s
    if sample_seed is None:
        sample_seed = int(rng.integers(np.iinfo(np.int64).max))
    sample = draw_sample(skeleton.dist, skeleton.concept, sample_size, sample_seed)
    return replace(skeleton, sample=sample)


@dataclass
class ExperimentResult:
    rows: list[ExperimentRow]
    summary: dict
    csv_path: Path | None = None
    summary_path: Path | None = None
    figure_paths: list[Path] = field(default_factory=list)


def _run_cell(cfg: ExperimentConfig, trial: int, m: int) -> ExperimentRow:
    start = time.perf_counter()
    try:
        instance = generate_instance(cfg, trial, m)
        problems = validate_instance(instance)
        if problems:
            raise ValueError("invalid instance: " + "; ".join(problems))
        rounds = cfg.train_rounds or horizon_for(
            len(instance.sample), instance.budget, cfg.epsilon
        )
        output = mw_train(instance, rounds, cfg.eta)
        learner = learner_guarantee(output, instance)
        adversary = adversary_guarantee(output.adversary, instance)
        value = exact_game_value(instance).value if cfg.solve_exact else math.nan
        mixture = output.mixture()
        risk = true_risk(
            mixture, instance.dist, instance.concept, instance.rho,
            instance.hypotheses, instance.loss,
        )
        empirical = empirical_risk(
            mixture, instance.sample, instance.rho, instance.hypotheses, instance.loss
        )
        return ExperimentRow(
            trial=trial,
            sample_size=m,
            value=value,
            learner_guarantee=learner,
            adversary_guarantee=adversary,
            true_risk=risk,
            empirical_risk=empirical,
            gap=abs(risk - empirical),
            rounds=rounds,
            wall_time_s=time.perf_counter() - start,
        )
    except Exception as err:  # error rows never abort the sweep
        return ExperimentRow(
            trial=trial,
            sample_size=m,
            value=math.nan,
            learner_guarantee=math.nan,
            adversary_guarantee=math.nan,
            true_risk=math.nan,
            empirical_risk=math.nan,
            gap=math.nan,
            rounds=0,
            wall_time_s=time.perf_counter() - start,
            error=f"{type(err).__name__}: {err}",
        )


def gap_decay_slope(rows: list[ExperimentRow]) -> tuple[dict[int, float], float | None]:
    """Median generalization gap per sample size and the slope of
    log(median gap) against log(m)."""
    by_m: dict[int, list[float]] = {}
    for row in rows:
        if not row.error and math.isfinite(row.gap):
            by_m.setdefault(row.sample_size, []).append(row.gap)
    medians = {m: float(np.median(g)) for m, g in sorted(by_m.items())}
    usable = {m: g for m, g in medians.items() if g > 0}
    if len(usable) < 2:
        return medians, None
    xs = np.log(np.array(list(usable.keys()), dtype=np.float64))
    ys = np.log(np.array(list(usable.values())))
    slope = float(np.polyfit(xs, ys, 1)[0])
    return medians, slope


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    started = time.perf_counter()
    rows = [
        _run_cell(cfg, trial, m)
        for trial in range(cfg.trials)
        for m in cfg.sample_sizes
    ]

    tol = 1e-9
    checked = passed = 0
    for row in rows:
        if row.error or not math.isfinite(row.value):
            continue
        checked += 1
        if (
            row.learner_guarantee - row.value <= cfg.epsilon + tol
            and row.value - row.adversary_guarantee <= cfg.epsilon + tol
        ):
            passed += 1
    medians, slope = gap_decay_slope(rows)
    summary = {
        "config": cfg.to_json(),
        "rows": len(rows),
        "errors": sum(1 for row in rows if row.error),
        "eps_optimality": {
            "checked": checked,
            "passed": passed,
            "pass_rate": (passed / checked) if checked else None,
        },
        "gap_decay": {
            "median_gap_by_m": {str(m): g for m, g in medians.items()},
            "slope": slope,
        },
        "wall_time_s": time.perf_counter() - started,
    }

    result = ExperimentResult(rows=rows, summary=summary)
    if cfg.out_dir is not None:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        result.csv_path = out / "rows.csv"
        write_rows_csv(rows, result.csv_path)
        result.summary_path = out / "summary.json"
        result.summary_path.write_text(json.dumps(summary, indent=2))
        if cfg.make_figures:
            from .figures import render_experiment_figures

            result.figure_paths = render_experiment_figures(rows, summary, out)
    return result


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows_csv(rows: list[ExperimentRow], path: str | Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(getattr(row, col)) for col in CSV_COLUMNS])


def read_rows_csv(path: str | Path) -> list[ExperimentRow]:
    out = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        for record in reader:
            out.append(
                ExperimentRow(
                    trial=int(record["trial"]),
                    sample_size=int(record["sample_size"]),
                    value=float(record["value"]),
                    learner_guarantee=float(record["learner_guarantee"]),
                    adversary_guarantee=float(record["adversary_guarantee"]),
                    true_risk=float(record["true_risk"]),
                    empirical_risk=float(record["empirical_risk"]),
                    gap=float(record["gap"]),
                    rounds=int(record["rounds"]),
                    wall_time_s=float(record["wall_time_s"]),
                    error=record["error"],
                )
            )
    return out
