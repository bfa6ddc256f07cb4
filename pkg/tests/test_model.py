import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustgame.harness import ExperimentConfig, generate_instance, matching_pennies_instance
from robustgame.model import (
    Concept,
    CorruptionMap,
    Distribution,
    FiniteDomain,
    GameInstance,
    LabeledSample,
    draw_sample,
    validate_document,
    validate_instance,
)


def test_domain_rejects_empty():
    with pytest.raises(ValueError):
        FiniteDomain(0)


def test_distribution_must_be_normalized():
    with pytest.raises(ValueError):
        Distribution([0.5, 0.4])
    with pytest.raises(ValueError):
        Distribution([1.5, -0.5])
    d = Distribution.renormalized([2.0, 2.0])
    assert np.allclose(d.weights, [0.5, 0.5])


def test_corruption_map_invariants():
    with pytest.raises(ValueError):
        CorruptionMap(((0, 1, 2),), budget=2, corrupted_size=3)
    with pytest.raises(ValueError):
        CorruptionMap(((5,),), budget=1, corrupted_size=3)
    with pytest.raises(ValueError):
        CorruptionMap(((),), budget=1, corrupted_size=3)
    rho = CorruptionMap(((2, 0), (1,)), budget=2, corrupted_size=3)
    assert rho.lists[0] == (2, 0)  # order is stable
    assert rho.max_width() == 2


def test_concept_real_labels_clamped():
    c = Concept("real", [-0.5, 0.3, 1.7])
    assert c.labels.min() >= 0.0 and c.labels.max() <= 1.0


def test_draw_sample_point_mass():
    dist = Distribution.point_mass(5, 3)
    concept = Concept("categorical", [0, 1, 0, 1, 0], 2)
    sample = draw_sample(dist, concept, 5, seed=11)
    assert sample.pairs() == [(3, 1.0)] * 5


def test_draw_sample_uniform_frequencies():
    # binomial tails put each frequency in [0.45, 0.55] except with
    # probability far below 1e-20 at m = 10000
    dist = Distribution.uniform(2)
    concept = Concept("categorical", [0, 1], 2)
    sample = draw_sample(dist, concept, 10_000, seed=5)
    freq = np.mean(sample.x_indices == 0)
    assert 0.45 <= freq <= 0.55


def test_draw_sample_deterministic():
    dist = Distribution.uniform(4)
    concept = Concept("real", [0.1, 0.4, 0.6, 0.9])
    a = draw_sample(dist, concept, 64, seed=123)
    b = draw_sample(dist, concept, 64, seed=123)
    assert np.array_equal(a.x_indices, b.x_indices)
    assert np.array_equal(a.labels, b.labels)
    c = draw_sample(dist, concept, 64, seed=124)
    assert not np.array_equal(a.x_indices, c.x_indices)


def test_sample_labels_match_concept():
    dist = Distribution.uniform(3)
    concept = Concept("categorical", [2, 0, 1], 3)
    sample = draw_sample(dist, concept, 50, seed=9)
    for x, y in sample.pairs():
        assert y == concept.label_of(x)


def test_validate_wellformed_instance():
    assert validate_instance(matching_pennies_instance()) == []


def test_validate_document_reports_rho_budget_violation():
    doc = matching_pennies_instance().to_json()
    doc["k"] = 1  # rho(0) now has budget + 1 entries
    violations = validate_document(doc)
    assert any("rho(0)" in v for v in violations)


def test_validate_document_reports_unnormalized_distribution():
    doc = matching_pennies_instance().to_json()
    doc["dist"] = [0.9]
    violations = validate_document(doc)
    assert any("not normalized" in v for v in violations)


def test_validate_document_reports_label_mismatch():
    doc = matching_pennies_instance().to_json()
    doc["sample"] = [[0, 1]]
    violations = validate_document(doc)
    assert any("differs from concept" in v for v in violations)


def test_validate_instance_cross_checks():
    inst = matching_pennies_instance()
    bad = GameInstance(
        clean=inst.clean,
        corrupted=inst.corrupted,
        rho=inst.rho,
        dist=Distribution.uniform(2),  # wrong domain size
        concept=inst.concept,
        sample=inst.sample,
        hypotheses=inst.hypotheses,
        loss=inst.loss,
    )
    assert any("distribution covers" in v for v in validate_instance(bad))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(0, 7))
def test_instance_json_round_trip(seed, trial):
    cfg = ExperimentConfig(
        scenario="random-multiclass", seed=seed, num_clean=5, num_corrupted=6,
        num_hypotheses=4, budget=3, num_labels=3, sample_sizes=(6,), trials=1,
    )
    inst = generate_instance(cfg, trial, 6)
    doc = inst.to_json()
    again = GameInstance.from_json(json.loads(json.dumps(doc)))
    assert again.to_json() == doc
    assert validate_instance(again) == []


def test_json_round_trip_real_labels(tmp_path):
    cfg = ExperimentConfig(
        scenario="random-regression", seed=3, num_clean=4, num_corrupted=5,
        num_hypotheses=3, budget=2, sample_sizes=(5,), trials=1, loss="l2",
    )
    inst = generate_instance(cfg, 0, 5)
    path = tmp_path / "inst.json"
    inst.save(path)
    again = GameInstance.load(path)
    assert again.to_json() == inst.to_json()
