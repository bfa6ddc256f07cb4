"""Command-line surface: train, exact, dims, rademacher, bounds, experiment,
validate.

Exit codes: 0 on success, 1 when a requested check fails (instance
violations, epsilon-optimality failures), 2 on usage or I/O errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds as bounds_mod
from . import dims as dims_mod
from . import rademacher as rademacher_mod
from .exact import exact_game_value
from .game import adversary_guarantee, horizon_for, learner_guarantee, mw_train
from .harness import ExperimentConfig, run_experiment
from .model import GameInstance, validate_document, validate_instance


def _load_json(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _write_json(path: str, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2))


def _cmd_train(args) -> int:
    instance = GameInstance.from_json(_load_json(args.instance))
    rounds = args.rounds or horizon_for(
        len(instance.sample), instance.budget, args.epsilon
    )
    output = mw_train(instance, rounds, args.eta)
    learner = learner_guarantee(output, instance)
    adversary = adversary_guarantee(output.adversary, instance)
    _write_json(
        args.out,
        {
            "rounds": rounds,
            "eta": output.eta,
            "hypothesis_indices": output.hypothesis_indices.tolist(),
            "adversary": [row.tolist() for row in output.adversary.rows],
            "learner_guarantee": learner,
            "adversary_guarantee": adversary,
            "erm_objectives": output.erm_objectives.tolist(),
            "log_weight_totals": output.log_weight_totals.tolist(),
        },
    )
    print(
        f"trained {rounds} rounds: learner guarantee {learner:.6f}, "
        f"adversary guarantee {adversary:.6f} -> {args.out}"
    )
    return 0


def _cmd_exact(args) -> int:
    instance = GameInstance.from_json(_load_json(args.instance))
    solution = exact_game_value(instance)
    _write_json(
        args.out,
        {
            "value": solution.value,
            "mixture": {
                "indices": solution.mixture.indices.tolist(),
                "weights": solution.mixture.weights.tolist(),
            },
            "slacks": solution.slacks.tolist(),
            "adversary": [row.tolist() for row in solution.adversary_rows],
            "iterations": solution.iterations,
        },
    )
    print(f"exact game value {solution.value:.6f} -> {args.out}")
    return 0


def _cmd_dims(args) -> int:
    cls = dims_mod.PatternClass.from_json(_load_json(args.cls))
    if args.measure == "vc":
        report = dims_mod.vc_dim(cls)
    elif args.measure == "graph":
        report = dims_mod.graph_dim(cls)
    elif args.measure == "natarajan":
        report = dims_mod.natarajan_dim(cls)
    elif args.measure == "fat":
        if args.gamma is None:
            raise ValueError("--measure fat requires --gamma")
        report = dims_mod.fat_shattering_dim(cls, args.gamma)
    else:  # fat-zero
        if args.gamma is None:
            raise ValueError("--measure fat-zero requires --gamma")
        report = dims_mod.fat_shattering_dim_at_zero(cls, args.gamma)
    doc = {
        "measure": report.measure,
        "dimension": report.dimension,
        "witness_points": list(report.witness_points),
    }
    if report.gamma is not None:
        doc["gamma"] = report.gamma
    if report.witness_shift is not None:
        doc["witness_shift"] = list(report.witness_shift)
    if report.witness_labels is not None:
        doc["witness_labels"] = json.loads(json.dumps(report.witness_labels))
    _write_json(args.out, doc)
    print(f"{report.measure} dimension {report.dimension} -> {args.out}")
    return 0


def _cmd_rademacher(args) -> int:
    cls = dims_mod.PatternClass.from_json(_load_json(args.cls))
    if args.mc is not None:
        estimate = rademacher_mod.rademacher_mc(cls, args.mc, args.seed)
    else:
        estimate = rademacher_mod.rademacher_exact(cls)
    doc = {
        "value": estimate.value,
        "mode": estimate.mode,
        "trials": estimate.trials,
        "std_error": estimate.std_error,
    }
    if args.out:
        _write_json(args.out, doc)
    print(json.dumps(doc))
    return 0


def _profile_from_json(doc: dict) -> bounds_mod.FatProfile:
    kind = doc["kind"]
    if kind == "power":
        return bounds_mod.power_profile(doc["coefficient"], doc["exponent"])
    if kind == "table":
        return bounds_mod.step_profile(doc["gammas"], doc["values"])
    if kind == "constant":
        return bounds_mod.constant_profile(doc["value"])
    raise ValueError(f"unknown fat profile kind {kind!r}")


def _cmd_bounds(args) -> int:
    doc = _load_json(args.config)
    profile_doc = doc.pop("fat_profile", None)
    n = doc.pop("n", None)
    alpha = doc.pop("alpha", 0.0)
    cfg = bounds_mod.BoundConfig(
        **doc, fat_profile=_profile_from_json(profile_doc) if profile_doc else None
    )
    out: dict = {"notes": []}
    if cfg.vc is not None:
        out["m0_binary"] = bounds_mod.sample_size_binary(cfg)
    if cfg.graph_dim is not None:
        out["m0_multiclass_graph"] = bounds_mod.sample_size_multiclass(cfg, "graph")
    if cfg.natarajan_dim is not None and cfg.num_labels is not None:
        out["m0_multiclass_natarajan"] = bounds_mod.sample_size_multiclass(
            cfg, "natarajan"
        )
    if cfg.fat_profile is not None:
        for loss in ("l1", "l2"):
            try:
                out[f"m0_regression_{loss}"] = bounds_mod.sample_size_regression(
                    cfg, loss
                )
            except ValueError as err:
                out["notes"].append(str(err))
        if n is not None:
            try:
                out["dudley_bound"] = bounds_mod.dudley_entropy_bound(
                    cfg.fat_profile, n, alpha, cfg.fat_scale, cfg.k_tilde
                )
            except ValueError as err:
                out["notes"].append(str(err))
    out["hyperplane"] = {
        str(s): vars(
            bounds_mod.linear_predictor_complexity(
                cfg.epsilon, cfg.delta, cfg.k, s, cfg.c1, cfg.c2
            )
        )
        for s in ([n] if n is not None else [])
    }
    _write_json(args.out, out)
    print(f"bounds -> {args.out}")
    return 0


def _cmd_experiment(args) -> int:
    doc = _load_json(args.config)
    if args.out_dir:
        doc["out_dir"] = args.out_dir
    if args.no_figures:
        doc["make_figures"] = False
    cfg = ExperimentConfig.from_json(doc)
    result = run_experiment(cfg)
    opt = result.summary["eps_optimality"]
    print(
        f"{len(result.rows)} rows, {result.summary['errors']} errors, "
        f"eps-optimality {opt['passed']}/{opt['checked']}, "
        f"decay slope {result.summary['gap_decay']['slope']}"
    )
    if result.csv_path:
        print(f"rows -> {result.csv_path}")
    for path in result.figure_paths:
        print(f"figure -> {path}")
    if opt["checked"] and opt["passed"] < opt["checked"]:
        return 1
    return 0


def _cmd_validate(args) -> int:
    doc = _load_json(args.instance)
    violations = validate_document(doc)
    if not violations:
        violations = validate_instance(GameInstance.from_json(doc))
    if violations:
        for violation in violations:
            print(violation)
        return 1
    print("ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustgame",
        description="Corruption-robust learning games: training, exact values, "
        "dimensions, Rademacher estimates, bounds, and experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run multiplicative-weights training")
    p.add_argument("--instance", required=True, help="game instance JSON")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--T", dest="rounds", type=int, default=None,
                   help="override the horizon formula")
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("exact", help="solve the empirical game exactly")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_exact)

    p = sub.add_parser("dims", help="compute a combinatorial dimension")
    p.add_argument("--class", dest="cls", required=True, help="pattern class JSON")
    p.add_argument(
        "--measure",
        required=True,
        choices=("vc", "graph", "natarajan", "fat", "fat-zero"),
    )
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_dims)

    p = sub.add_parser("rademacher", help="estimate empirical Rademacher complexity")
    p.add_argument("--class", dest="cls", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true", default=True)
    group.add_argument("--mc", type=int, default=None, help="Monte Carlo trials")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_rademacher)

    p = sub.add_parser("bounds", help="evaluate sample-complexity bounds")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_bounds)

    p = sub.add_parser("experiment", help="run an end-to-end experiment sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None, help="override the config's out_dir")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(handler=_cmd_experiment)

    p = sub.add_parser("validate", help="check a game instance's invariants")
    p.add_argument("--instance", required=True)
    p.set_defaults(handler=_cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
