"""Batch command line: solve instances, generate adversarial fixtures,
sparsify strategies, decompose fractional points, and validate inputs.

Reports are JSON on stdout with a human-readable summary on stderr.
Exit codes: 0 success, 2 model/input error, 3 solver failure.
Identical inputs always produce identical outputs.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .errors import ModelError, RobustSetsError, SizeLimitError, SolverFailure
from .exact import exact_game_solve, gen_hitting_set_instance, gen_partition_instance
from .instance import (CardinalityRatioObjective, LinearObjective,
                       ProblemInstance, worst_case_value)
from .lpscheme import FractionalPoint, decompose, solve_lp_scheme, solve_relaxed
from .mwu import mwu_solve, sparsify
from .reductions import build_reduction, check_reduction, family_gamma
from .serialize import (dumps_canonical, instance_from_json, instance_to_json,
                        load_instance, strategy_from_json, strategy_to_json)
from .subroutines import (BruteForceSubroutine, CardinalityDpSubroutine,
                          GreedySubroutine, KnapsackFptasSubroutine)
from .systems import IntersectionSystem, KnapsackSystem

VALUE_CHECK_TOL = 1e-6


def _emit(report: dict, summary: str) -> int:
    print(dumps_canonical(report))
    print(summary, file=sys.stderr)
    return 0


def _pick_subroutine(name: str, sub_eps: float, inst: ProblemInstance):
    if name == "auto":
        knapsack = isinstance(inst.system, KnapsackSystem)
        if knapsack and all(isinstance(f, CardinalityRatioObjective)
                            for f in inst.objectives):
            name = "cardinality-dp"
        elif knapsack and all(isinstance(f, LinearObjective)
                              for f in inst.objectives):
            name = "knapsack-fptas"
        elif (inst.system.is_matroid
              or isinstance(inst.system, IntersectionSystem)) \
                and all(f.monotone for f in inst.objectives):
            name = "greedy"
        else:
            name = "brute-force"
    if name == "brute-force":
        return BruteForceSubroutine()
    if name == "greedy":
        return GreedySubroutine()
    if name == "knapsack-fptas":
        return KnapsackFptasSubroutine(sub_eps)
    if name == "cardinality-dp":
        return CardinalityDpSubroutine(sub_eps)
    raise ModelError(f"unknown subroutine {name!r}")


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    t0 = time.perf_counter()
    strategy = None
    config: dict = {"engine": args.engine}

    if args.engine == "exact":
        sol = exact_game_solve(inst)
        value = lower = upper = sol.value
        strategy, claimed = sol.strategy, sol.primal_value
    elif args.engine == "lp":
        system = inst.system
        if isinstance(system, IntersectionSystem) and system.mu >= 3:
            rel = solve_relaxed(inst)
            value, lower, upper = rel.value, rel.lower, rel.upper
            config["relaxation_alpha"] = 1.0 / system.mu
            try:
                strategy = decompose(
                    FractionalPoint(rel.point.x / system.mu), system)
                claimed = worst_case_value(strategy, inst)
            except SizeLimitError:
                strategy = None
        else:
            value, point = solve_lp_scheme(inst)
            lower = upper = value
            strategy = decompose(point, system)
            claimed = value
    elif args.engine == "mwu":
        sub = _pick_subroutine(args.subroutine, args.subroutine_eps, inst)
        p, trace = mwu_solve(inst, sub, args.epsilon, trace_path=args.trace)
        strategy = p
        value = claimed = worst_case_value(p, inst)
        lower = value
        cfg = trace.config
        slack = cfg.alpha - args.epsilon
        upper = value / slack if slack > 0 else None
        config.update({"subroutine": sub.name, "epsilon": cfg.epsilon,
                       "delta": cfg.delta, "T": cfg.T, "eta": cfg.eta,
                       "alpha": cfg.alpha, "gamma": cfg.gamma})
    else:
        raise ModelError(f"unknown engine {args.engine!r}")

    wall = time.perf_counter() - t0
    strategy_value = None
    if strategy is not None:
        strategy_value = worst_case_value(strategy, inst)
        if abs(strategy_value - claimed) > VALUE_CHECK_TOL:
            print(f"internal error: reported value {claimed} does not match "
                  f"re-evaluated strategy value {strategy_value}",
                  file=sys.stderr)
            return 3
    report = {
        "solver": args.engine,
        "value": value,
        "lower": lower,
        "upper": upper,
        "strategy": (strategy_to_json(strategy, inst.ground)
                     if strategy is not None else None),
        "strategy_value": strategy_value,
        "wall_time_s": wall,
        "config": config,
    }
    atoms = strategy.support_size if strategy is not None else 0
    return _emit(report, f"{args.engine}: value {value:.6g} "
                         f"[{lower:.6g}, {upper if upper is None else round(upper, 6)}] "
                         f"{atoms} support atoms in {wall:.2f}s")


def _parse_csv(text: str) -> list[str]:
    return [tok.strip() for tok in text.split(",") if tok.strip()]


def cmd_generate(args) -> int:
    if args.kind == "hitting-set":
        if args.random is not None:
            n_elem, n_sets, r = args.random
            rng = np.random.default_rng(args.seed)
            elements = [f"e{i}" for i in range(n_elem)]
            subsets = []
            for _ in range(n_sets):
                size = int(rng.integers(1, max(2, n_elem // 2 + 1)))
                subsets.append(sorted(
                    elements[i] for i in
                    rng.choice(n_elem, size=size, replace=False)))
        else:
            if not args.elements or not args.subsets:
                raise ModelError("hitting-set needs --elements and --subsets "
                                 "(or --random)")
            elements = _parse_csv(args.elements)
            subsets = [_parse_csv(block) for block in args.subsets.split(";")]
            r = args.rank
        inst = gen_hitting_set_instance(elements, subsets, r)
        metadata = {"kind": "hitting-set", "rank": r, "n_sets": len(subsets)}
    elif args.kind == "partition":
        values = [int(v) for v in _parse_csv(args.values or "")]
        inst, alpha = gen_partition_instance(values)
        metadata = {"kind": "partition", "alpha": alpha,
                    "n_pairs": len(values) // 2}
    else:
        raise ModelError(f"unknown generator kind {args.kind!r}")

    payload = dumps_canonical(instance_to_json(inst))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(payload + "\n")
        print(dumps_canonical(metadata))
    else:
        print(dumps_canonical({"instance": instance_to_json(inst),
                               "metadata": metadata}))
    print(f"generated {args.kind} instance with {inst.n_elements} elements, "
          f"{inst.n_objectives} scenarios", file=sys.stderr)
    return 0


def cmd_sparsify(args) -> int:
    inst = load_instance(args.instance)
    with open(args.strategy) as fh:
        p = strategy_from_json(json.load(fh), inst.ground)
    before = worst_case_value(p, inst)
    sparse = sparsify(p, inst)
    after = worst_case_value(sparse, inst)
    report = {"strategy": strategy_to_json(sparse, inst.ground),
              "value_before": before, "value_after": after,
              "support_before": p.support_size,
              "support_after": sparse.support_size}
    return _emit(report, f"sparsify: {p.support_size} -> "
                         f"{sparse.support_size} atoms, value {before:.6g} -> "
                         f"{after:.6g}")


def cmd_decompose(args) -> int:
    inst = load_instance(args.instance)
    if args.point.startswith("@"):
        with open(args.point[1:]) as fh:
            coords = json.load(fh)
    else:
        coords = json.loads(args.point)
    x = np.array([float(coords[name]) for name in inst.ground.elements])
    strategy = decompose(FractionalPoint(x), inst.system)
    report = {"strategy": strategy_to_json(strategy, inst.ground),
              "support": strategy.support_size}
    return _emit(report, f"decomposed into {strategy.support_size} atoms")


def cmd_check(args) -> int:
    with open(args.instance) as fh:
        raw = json.load(fh)
    checks = []

    inst = instance_from_json(raw)
    canon = dumps_canonical(instance_to_json(inst))
    reparsed = dumps_canonical(instance_to_json(instance_from_json(
        json.loads(canon))))
    checks.append({"name": "schema-round-trip", "ok": canon == reparsed})

    system = inst.system
    checks.append({"name": "empty-set-independent",
                   "ok": system.is_independent(frozenset())
                   or not system.downward_closed})
    if system.downward_closed and inst.n_elements <= 12:
        ok = all(system.is_independent(S - {e})
                 for S in system.enumerate_independent() for e in S)
        checks.append({"name": "downward-closure", "ok": ok})

    rng = np.random.default_rng(0)
    sample_sets = [frozenset(int(e) for e in
                             np.where(rng.random(inst.n_elements) < 0.4)[0])
                   for _ in range(64)]
    for i, f in enumerate(inst.objectives):
        ok = abs(f.value(frozenset())) <= 1e-9 and all(
            f.value(X) >= -1e-9 for X in sample_sets)
        checks.append({"name": f"objective-{i}-nonnegative-zero-empty", "ok": ok})

    try:
        gamma = family_gamma(inst.objectives)
        anchor = max(max(f.value(X) for X in sample_sets + [frozenset(range(inst.n_elements))])
                     for f in inst.objectives)
        eta = anchor if anchor > 0 else 1.0
        ok = True
        for f in inst.objectives:
            g = build_reduction(f, eta)
            res, _ = check_reduction(f, g, eta, g.gamma, samples=256)
            ok = ok and res
        checks.append({"name": "reduction-laws", "ok": ok,
                       "detail": f"eta={eta}, gamma={gamma}"})
    except (ModelError, SizeLimitError) as exc:
        checks.append({"name": "reduction-laws", "ok": True,
                       "detail": f"skipped: {exc}"})

    all_ok = all(c["ok"] for c in checks)
    print(dumps_canonical({"ok": all_ok, "checks": checks}))
    print(("all checks passed" if all_ok else "CHECK FAILURES"),
          file=sys.stderr)
    return 0 if all_ok else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustsets",
        description="Randomized max-min optimization over independence systems")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("instance")
    p.add_argument("--engine", choices=["exact", "lp", "mwu"], default="exact")
    p.add_argument("--epsilon", type=float, default=0.2,
                   help="accuracy target for the mwu engine")
    p.add_argument("--subroutine", default="auto",
                   choices=["auto", "brute-force", "greedy", "knapsack-fptas",
                            "cardinality-dp"])
    p.add_argument("--subroutine-eps", type=float, default=0.25,
                   help="inner accuracy for fptas/dp subroutines")
    p.add_argument("--trace", default=None,
                   help="write per-round JSON lines to this file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="emit an adversarial instance")
    p.add_argument("--kind", choices=["hitting-set", "partition"],
                   required=True)
    p.add_argument("--elements", help="comma-separated element names")
    p.add_argument("--subsets", help="semicolon-separated comma lists")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--random", nargs=3, type=int, default=None,
                   metavar=("ELEMS", "SETS", "RANK"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--values", help="comma-separated integers (partition kind)")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sparsify", help="shrink a strategy's support by LP")
    p.add_argument("strategy")
    p.add_argument("instance")
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("decompose",
                       help="write per-element probabilities as a strategy")
    p.add_argument("instance")
    p.add_argument("--point", required=True,
                   help="JSON object element->probability, or @file")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("check", help="validate an instance file")
    p.add_argument("instance")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except (ModelError, RobustSetsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
