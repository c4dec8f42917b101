"""JSON schemas for instances, strategies, weight polytopes, and digraphs.

Canonical dumps are deterministic (sorted keys, fixed separators) and
round-trip float64 values exactly.
"""
from __future__ import annotations

import json

import numpy as np

from .errors import ModelError
from .instance import (CardinalityRatioObjective, CoverageObjective, GroundSet,
                       LinearObjective, MixedStrategy, Objective,
                       ProblemInstance, SubmodularTableObjective)
from .lpscheme import FunctionPolytope
from .systems import (ExplicitListSystem, IndependenceSystem,
                      IntersectionSystem, KnapsackSystem, PartitionMatroid,
                      StPathSystem, UniformMatroid)


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def system_to_json(system: IndependenceSystem, ground: GroundSet) -> dict:
    names = ground.elements
    if isinstance(system, UniformMatroid):
        return {"kind": "uniform", "rank": system.r}
    if isinstance(system, PartitionMatroid):
        return {"kind": "partition", "blocks": [
            {"elements": [names[e] for e in elems], "capacity": cap}
            for elems, cap in system.blocks]}
    if isinstance(system, ExplicitListSystem):
        return {"kind": "explicit", "sets": sorted(
            (sorted(names[e] for e in S) for S in system.sets),
            key=lambda s: (len(s), s))}
    if isinstance(system, KnapsackSystem):
        return {"kind": "knapsack",
                "sizes": {names[e]: int(system.sizes[e])
                          for e in range(len(names))},
                "capacity": system.capacity}
    if isinstance(system, IntersectionSystem):
        return {"kind": "intersection",
                "matroids": [system_to_json(m, ground) for m in system.matroids]}
    if isinstance(system, StPathSystem):
        return {"kind": "st_path",
                "nodes": list(range(system.n_nodes)),
                "arcs": [{"name": names[a], "tail": u, "head": v}
                         for a, (u, v) in enumerate(system.arcs)],
                "source": system.source, "sink": system.sink}
    raise ModelError(f"cannot serialize system kind {system.kind!r}")


def system_from_json(d: dict, ground: GroundSet) -> IndependenceSystem:
    kind = d.get("kind")
    n = len(ground)
    if kind == "uniform":
        return UniformMatroid(n, int(d["rank"]))
    if kind == "partition":
        blocks = [(tuple(ground.index(e) for e in blk["elements"]),
                   int(blk["capacity"])) for blk in d["blocks"]]
        return PartitionMatroid(n, blocks)
    if kind == "explicit":
        return ExplicitListSystem(
            n, [frozenset(ground.index(e) for e in S) for S in d["sets"]])
    if kind == "knapsack":
        sizes = [d["sizes"][name] for name in ground.elements]
        return KnapsackSystem(sizes, int(d["capacity"]))
    if kind == "intersection":
        return IntersectionSystem(
            [system_from_json(sub, ground) for sub in d["matroids"]])
    if kind == "st_path":
        arcs = []
        for arc in d["arcs"]:
            if ground.index(arc["name"]) != len(arcs):
                raise ModelError("arc order must match the element order")
            arcs.append((int(arc["tail"]), int(arc["head"])))
        return StPathSystem(len(d["nodes"]), arcs, int(d["source"]),
                            int(d["sink"]))
    raise ModelError(f"unknown system kind {kind!r}")


def objective_to_json(f: Objective, ground: GroundSet) -> dict:
    names = ground.elements
    if isinstance(f, LinearObjective):
        return {"kind": "linear",
                "weights": {names[e]: float(f.weights[e])
                            for e in range(len(names))}}
    if isinstance(f, SubmodularTableObjective):
        return {"kind": "submodular_table", "table": [float(v) for v in f.table]}
    if isinstance(f, CoverageObjective):
        return {"kind": "coverage",
                "covers": {names[e]: sorted(str(i) for i in f.covers[e])
                           for e in range(len(names))},
                "item_weights": {str(i): float(w)
                                 for i, w in enumerate(f.item_weights)}}
    if isinstance(f, CardinalityRatioObjective):
        return {"kind": "cardinality_ratio", "k": f.k,
                "denominator": f.denominator,
                "values": {names[e]: float(f.values[e])
                           for e in range(len(names))}}
    raise ModelError(f"cannot serialize objective kind {f.kind!r}")


def objective_from_json(d: dict, ground: GroundSet) -> Objective:
    kind = d.get("kind")
    names = ground.elements
    if kind == "linear":
        return LinearObjective([d["weights"][e] for e in names])
    if kind == "submodular_table":
        return SubmodularTableObjective(d["table"], len(ground))
    if kind == "coverage":
        item_names = sorted(d["item_weights"])
        item_index = {name: i for i, name in enumerate(item_names)}
        covers = [[item_index[i] for i in d["covers"][e]] for e in names]
        weights = [d["item_weights"][name] for name in item_names]
        return CoverageObjective(covers, weights)
    if kind == "cardinality_ratio":
        return CardinalityRatioObjective(
            int(d["k"]), float(d["denominator"]),
            [d["values"][e] for e in names])
    raise ModelError(f"unknown objective kind {kind!r}")


def instance_to_json(inst: ProblemInstance) -> dict:
    return {"elements": list(inst.ground.elements),
            "system": system_to_json(inst.system, inst.ground),
            "objectives": [objective_to_json(f, inst.ground)
                           for f in inst.objectives]}


def instance_from_json(d: dict) -> ProblemInstance:
    ground = GroundSet(d["elements"])
    system = system_from_json(d["system"], ground)
    objectives = [objective_from_json(o, ground) for o in d["objectives"]]
    return ProblemInstance(ground, objectives, system)


def save_instance(inst: ProblemInstance, path):
    with open(path, "w") as fh:
        fh.write(dumps_canonical(instance_to_json(inst)) + "\n")


def load_instance(path) -> ProblemInstance:
    with open(path) as fh:
        return instance_from_json(json.load(fh))


def strategy_to_json(strategy: MixedStrategy, ground: GroundSet) -> dict:
    return {"support": [{"set": ground.names(X), "probability": float(p)}
                        for X, p in strategy.atoms]}


def strategy_from_json(d: dict, ground: GroundSet) -> MixedStrategy:
    return MixedStrategy([(ground.index_set(atom["set"]),
                           float(atom["probability"]))
                          for atom in d["support"]])


def function_polytope_to_json(F: FunctionPolytope) -> dict:
    return {"A": [[float(v) for v in row] for row in F.A],
            "B": [[float(v) for v in row] for row in F.B],
            "c": [float(v) for v in F.c]}


def function_polytope_from_json(d: dict) -> FunctionPolytope:
    B = np.asarray(d.get("B", []), dtype=float)
    if B.size == 0:
        B = None
    return FunctionPolytope(d["A"], d["c"], B)


def path_game_from_json(d: dict) -> tuple[StPathSystem, np.ndarray, GroundSet]:
    """Digraph + per-scenario arc lengths for the shortest-path game."""
    arc_names = [arc["name"] for arc in d["arcs"]]
    ground = GroundSet(arc_names)
    arcs = [(int(arc["tail"]), int(arc["head"])) for arc in d["arcs"]]
    system = StPathSystem(len(d["nodes"]), arcs, int(d["source"]),
                          int(d["sink"]))
    lengths = np.array([[scen[name] for name in arc_names]
                        for scen in d["lengths"]], dtype=float)
    return system, lengths, ground
