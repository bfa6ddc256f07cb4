import json
import math

import numpy as np
import pytest

from robustgame.harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    ExperimentRow,
    gap_decay_slope,
    generate_instance,
    matching_pennies_instance,
    read_rows_csv,
    run_experiment,
    write_rows_csv,
)
from robustgame.model import validate_instance


def test_matching_pennies_fixture_is_canonical():
    inst = matching_pennies_instance()
    assert inst.clean.size == 1
    assert inst.corrupted.size == 2
    assert inst.rho.lists == ((0, 1),)
    assert inst.hypotheses.size == 2
    # loss matrix [[1, 0], [0, 1]] against the label 0
    assert inst.hypotheses.table[0, 0] != 0 and inst.hypotheses.table[0, 1] == 0
    assert inst.hypotheses.table[1, 0] == 0 and inst.hypotheses.table[1, 1] != 0


def test_generate_instance_deterministic():
    cfg = ExperimentConfig(
        scenario="random-multiclass", seed=42, num_clean=6, num_corrupted=8,
        num_hypotheses=5, budget=3, num_labels=3, sample_sizes=(5, 9), trials=2,
    )
    a = generate_instance(cfg, 1, 9)
    b = generate_instance(cfg, 1, 9)
    assert a.to_json() == b.to_json()
    c = generate_instance(cfg, 0, 9)
    assert c.to_json() != a.to_json()


def test_generate_instance_respects_budget_and_scenarios():
    for scenario in ("random-binary", "random-multiclass", "random-regression",
                     "thresholds", "matching-pennies"):
        cfg = ExperimentConfig(
            scenario=scenario, seed=7, num_clean=6, num_corrupted=6,
            num_hypotheses=4, budget=2, num_labels=3, sample_sizes=(6,), trials=1,
        )
        inst = generate_instance(cfg, 0, 6)
        assert validate_instance(inst) == []
        assert len(inst.sample) == 6


@pytest.mark.parametrize("trial", range(4))
def test_generated_instances_always_validate(trial):
    # 4 x 250 = 1000 generated instances in all
    for seed in range(250):
        cfg = ExperimentConfig(
            scenario=("random-binary", "random-regression", "random-multiclass")[seed % 3],
            seed=seed, num_clean=4 + seed % 5, num_corrupted=4 + (seed * 7) % 6,
            num_hypotheses=2 + seed % 4, budget=1 + seed % 3, num_labels=2 + seed % 3,
            sample_sizes=(3 + seed % 5,), trials=1,
        )
        inst = generate_instance(cfg, trial, cfg.sample_sizes[0])
        assert validate_instance(inst) == []


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(scenario="nope", seed=0)
    with pytest.raises(ValueError):
        ExperimentConfig(scenario="random-binary", seed=0, budget=9, num_corrupted=4)
    with pytest.raises(ValueError):
        ExperimentConfig(scenario="random-binary", seed=0, sample_sizes=())


def test_run_experiment_matching_pennies(tmp_path):
    cfg = ExperimentConfig(
        scenario="matching-pennies", seed=0, epsilon=0.05,
        sample_sizes=(1,), trials=3, out_dir=str(tmp_path / "mp"),
    )
    result = run_experiment(cfg)
    assert result.summary["eps_optimality"]["pass_rate"] == 1.0
    for row in result.rows:
        assert row.value == pytest.approx(0.5, abs=1e-9)
        assert row.adversary_guarantee - 1e-6 <= row.value <= row.learner_guarantee + 1e-6
    assert result.csv_path.exists()
    assert result.summary_path.exists()


def test_run_experiment_rows_ordering_invariant():
    cfg = ExperimentConfig(
        scenario="random-binary", seed=5, num_clean=5, num_corrupted=6,
        num_hypotheses=4, budget=2, epsilon=0.2, sample_sizes=(4, 8), trials=3,
    )
    result = run_experiment(cfg)
    for row in result.rows:
        assert not row.error
        assert row.adversary_guarantee - 1e-6 <= row.value <= row.learner_guarantee + 1e-6


def test_single_corruption_rows_collapse():
    cfg = ExperimentConfig(
        scenario="random-binary", seed=3, num_clean=5, num_corrupted=5,
        num_hypotheses=4, budget=1, sample_sizes=(6,), trials=2,
    )
    result = run_experiment(cfg)
    for row in result.rows:
        assert row.rounds == 1
        assert row.learner_guarantee == pytest.approx(row.value, abs=1e-9)
        assert row.adversary_guarantee == pytest.approx(row.value, abs=1e-9)


def test_error_rows_do_not_abort(tmp_path):
    # mismatched loss kind yields an invalid instance: the cell must produce
    # an error row, not an exception
    cfg = ExperimentConfig(
        scenario="random-regression", seed=1, loss="zero-one",
        num_clean=4, num_corrupted=4, num_hypotheses=3, budget=2,
        sample_sizes=(4,), trials=2, out_dir=str(tmp_path / "bad"),
    )
    result = run_experiment(cfg)
    assert result.summary["errors"] == len(result.rows) == 2
    for row in result.rows:
        assert row.error
        assert math.isnan(row.value)


def test_csv_round_trip_is_byte_identical(tmp_path):
    cfg = ExperimentConfig(
        scenario="random-binary", seed=11, num_clean=4, num_corrupted=5,
        num_hypotheses=3, budget=2, sample_sizes=(5,), trials=2,
    )
    rows = run_experiment(cfg).rows
    path_a = tmp_path / "a.csv"
    write_rows_csv(rows, path_a)
    again = read_rows_csv(path_a)
    path_b = tmp_path / "b.csv"
    write_rows_csv(again, path_b)
    assert path_a.read_bytes() == path_b.read_bytes()


def test_rerun_reproduces_rows_except_wall_time():
    cfg = ExperimentConfig(
        scenario="random-multiclass", seed=23, num_clean=5, num_corrupted=6,
        num_hypotheses=4, budget=2, num_labels=3, sample_sizes=(4, 7), trials=2,
    )
    first = run_experiment(cfg).rows
    second = run_experiment(cfg).rows
    stable = [c for c in CSV_COLUMNS if c != "wall_time_s"]
    for a, b in zip(first, second):
        for col in stable:
            va, vb = getattr(a, col), getattr(b, col)
            assert va == vb or (isinstance(va, float) and math.isnan(va) and math.isnan(vb))


def test_gap_decay_slope_on_synthetic_rows():
    rows = []
    for m in (25, 100, 400):
        for t in range(3):
            rows.append(
                ExperimentRow(
                    trial=t, sample_size=m, value=0.5, learner_guarantee=0.5,
                    adversary_guarantee=0.5, true_risk=0.5,
                    empirical_risk=0.5 + 1.0 / math.sqrt(m), gap=1.0 / math.sqrt(m),
                    rounds=1, wall_time_s=0.0,
                )
            )
    medians, slope = gap_decay_slope(rows)
    assert slope == pytest.approx(-0.5, abs=1e-9)
    assert set(medians) == {25, 100, 400}


def test_figures_rendered(tmp_path):
    cfg = ExperimentConfig(
        scenario="random-binary", seed=2, num_clean=16, num_corrupted=16,
        num_hypotheses=4, budget=2, epsilon=0.3, sample_sizes=(8, 16, 32),
        trials=3, out_dir=str(tmp_path / "figs"),
    )
    result = run_experiment(cfg)
    names = {p.name for p in result.figure_paths}
    assert "gap_decay.png" in names
    assert "optimality_gaps.png" in names
    for path in result.figure_paths:
        assert path.stat().st_size > 0


def test_figures_can_be_disabled(tmp_path):
    cfg = ExperimentConfig(
        scenario="matching-pennies", seed=0, sample_sizes=(1,), trials=1,
        out_dir=str(tmp_path / "nofigs"), make_figures=False,
    )
    result = run_experiment(cfg)
    assert result.figure_paths == []


def test_train_rounds_override_and_no_exact():
    cfg = ExperimentConfig(
        scenario="random-binary", seed=9, num_clean=5, num_corrupted=6,
        num_hypotheses=3, budget=2, sample_sizes=(6,), trials=1,
        train_rounds=7, solve_exact=False,
    )
    result = run_experiment(cfg)
    row = result.rows[0]
    assert row.rounds == 7
    assert math.isnan(row.value)
    assert result.summary["eps_optimality"]["checked"] == 0


def test_config_json_round_trip():
    cfg = ExperimentConfig(
        scenario="random-regression", seed=77, loss="l2", sample_sizes=(3, 6),
        trials=2, num_clean=5, num_corrupted=5, num_hypotheses=3, budget=2,
    )
    again = ExperimentConfig.from_json(json.loads(json.dumps(cfg.to_json())))
    assert again == cfg
