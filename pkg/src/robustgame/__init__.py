"""Robust learning against bounded input corruption, as a finite zero-sum game."""

from .bounds import (
    BoundConfig,
    dudley_entropy_bound,
    linear_predictor_complexity,
    sample_size_binary,
    sample_size_multiclass,
    sample_size_regression,
)
from .dims import (
    DimensionReport,
    PatternClass,
    derived_classes,
    disambiguate,
    fat_shattering_dim,
    fat_shattering_dim_at_zero,
    graph_dim,
    growth_function,
    loss_pattern_class,
    natarajan_dim,
    pointwise_max_class,
    slot_loss_class,
    vc_dim,
)
from .exact import ExactSolution, best_response_adversary, exact_game_value
from .game import (
    AdversaryStrategy,
    TrainOutput,
    adversary_guarantee,
    corrupted_pair_distribution,
    erm_oracle,
    horizon_for,
    learner_guarantee,
    mw_train,
)
from .harness import ExperimentConfig, generate_instance, run_experiment
from .hypotheses import (
    HypothesisClass,
    LossKind,
    MixtureStrategy,
    empirical_risk,
    mixture_loss,
    point_loss,
    true_risk,
)
from .model import (
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
from .rademacher import (
    RademacherEstimate,
    max_mixture_rademacher_check,
    rademacher_exact,
    rademacher_mc,
)

__version__ = "0.1.0"
