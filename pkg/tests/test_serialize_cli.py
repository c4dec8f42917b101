import json

import numpy as np
import pytest

from robustsets import (CardinalityRatioObjective, CoverageObjective, GroundSet,
                        IntersectionSystem, KnapsackSystem, LinearObjective,
                        MixedStrategy, PartitionMatroid, ProblemInstance,
                        StPathSystem, SubmodularTableObjective, UniformMatroid)
from robustsets.cli import main
from robustsets.serialize import (dumps_canonical, instance_from_json,
                                  instance_to_json, path_game_from_json,
                                  save_instance, load_instance,
                                  strategy_from_json, strategy_to_json)

from conftest import random_instance


def roundtrip(inst):
    blob = dumps_canonical(instance_to_json(inst))
    again = dumps_canonical(instance_to_json(instance_from_json(json.loads(blob))))
    assert blob == again
    return instance_from_json(json.loads(blob))


def test_roundtrip_all_system_kinds():
    g4 = GroundSet(["a", "b", "c", "d"])
    lin = [LinearObjective([0.5, 1.25, 0.0, 2.0])]
    systems = [
        UniformMatroid(4, 2),
        PartitionMatroid(4, [((0, 1), 1), ((2, 3), 2)]),
        KnapsackSystem([2, 3, 4, 5], 7),
        IntersectionSystem([UniformMatroid(4, 2),
                            PartitionMatroid(4, [((0, 1), 1), ((2, 3), 1)])]),
    ]
    for sys_ in systems:
        inst = roundtrip(ProblemInstance(g4, lin, sys_))
        assert inst.system.kind == sys_.kind

    g3 = GroundSet(["a", "b", "c"])
    from robustsets import ExplicitListSystem
    explicit = ProblemInstance(
        g3, [LinearObjective([1.0, 2.0, 3.0])],
        ExplicitListSystem.from_maximal(3, [frozenset({0, 1}), frozenset({2})]))
    back = roundtrip(explicit)
    assert back.system.sets == explicit.system.sets


def test_roundtrip_all_objective_kinds():
    g = GroundSet(["a", "b", "c"])
    objectives = [
        LinearObjective([0.1, 0.9, 0.7]),
        SubmodularTableObjective([0, 1, 1, 1.5, 2, 2.5, 2.5, 3], 3),
        CoverageObjective([[0], [0, 1], [1]], [1.5, 2.5]),
        CardinalityRatioObjective(2, 3.5, [3.0, 2.0, 1.0]),
    ]
    inst = ProblemInstance(g, objectives, UniformMatroid(3, 2))
    back = roundtrip(inst)
    rng = np.random.default_rng(1)
    for _ in range(20):
        X = frozenset(int(e) for e in np.where(rng.random(3) < 0.5)[0])
        for f, f2 in zip(inst.objectives, back.objectives):
            assert f.value(X) == f2.value(X)


def test_roundtrip_random_corpus():
    for seed in range(10):
        roundtrip(random_instance(seed, max_elements=6))


def test_roundtrip_path_system():
    g = GroundSet(["a1", "a2", "a3"])
    sys_ = StPathSystem(3, [(0, 1), (1, 2), (0, 2)], 0, 2)
    inst = ProblemInstance(g, [LinearObjective([1.0, 1.0, 1.0])], sys_)
    back = roundtrip(inst)
    assert back.system.arcs == sys_.arcs


def test_strategy_roundtrip():
    g = GroundSet(["a", "b"])
    p = MixedStrategy([({0}, 0.25), ({1}, 0.75)])
    blob = strategy_to_json(p, g)
    back = strategy_from_json(blob, g)
    assert back.atoms == p.atoms


def test_function_polytope_roundtrip():
    from robustsets.lpscheme import FunctionPolytope
    from robustsets.serialize import (function_polytope_from_json,
                                      function_polytope_to_json)
    F = FunctionPolytope.from_scenarios(np.array([[1.0, 0.25], [0.5, 2.0]]))
    blob = dumps_canonical(function_polytope_to_json(F))
    back = function_polytope_from_json(json.loads(blob))
    assert dumps_canonical(function_polytope_to_json(back)) == blob
    x = np.array([0.4, 0.6])
    assert back.min_inner(x) == pytest.approx(F.min_inner(x), abs=1e-9)


def test_path_game_schema():
    doc = {"nodes": [0, 1], "source": 0, "sink": 1,
           "arcs": [{"name": "top", "tail": 0, "head": 1},
                    {"name": "bottom", "tail": 0, "head": 1}],
           "lengths": [{"top": 1.0, "bottom": 3.0},
                       {"top": 3.0, "bottom": 1.0}]}
    system, L, ground = path_game_from_json(doc)
    assert L.shape == (2, 2)
    assert system.is_independent({0})


def test_save_load_file(tmp_path, intro_instance):
    path = tmp_path / "inst.json"
    save_instance(intro_instance, path)
    again = load_instance(path)
    assert dumps_canonical(instance_to_json(again)) == \
        dumps_canonical(instance_to_json(intro_instance))


# ------------------------------------------------------------------------ cli

@pytest.fixture
def intro_file(tmp_path, intro_instance):
    path = tmp_path / "intro.json"
    save_instance(intro_instance, path)
    return str(path)


def run_cli(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_cli_solve_exact(capsys, intro_file):
    rc, out, err = run_cli(capsys, ["solve", intro_file, "--engine", "exact"])
    assert rc == 0
    report = json.loads(out)
    assert report["value"] == pytest.approx(0.5, abs=1e-9)
    assert report["lower"] <= report["value"] <= report["upper"]
    assert len(report["strategy"]["support"]) == 2
    assert "value" in err


def test_cli_solve_mwu_within_guarantee(capsys, intro_file):
    rc, out, _ = run_cli(capsys, ["solve", intro_file, "--engine", "mwu",
                                  "--epsilon", "0.3"])
    assert rc == 0
    report = json.loads(out)
    assert report["value"] >= 0.35 - 1e-9
    assert report["config"]["T"] >= 1


def test_cli_solve_lp(capsys, intro_file):
    rc, out, _ = run_cli(capsys, ["solve", intro_file, "--engine", "lp"])
    assert rc == 0
    assert json.loads(out)["value"] == pytest.approx(0.5, abs=1e-7)


def test_cli_solve_deterministic(capsys, intro_file):
    rc1, out1, _ = run_cli(capsys, ["solve", intro_file, "--engine", "mwu"])
    rc2, out2, _ = run_cli(capsys, ["solve", intro_file, "--engine", "mwu"])
    assert rc1 == rc2 == 0
    r1, r2 = json.loads(out1), json.loads(out2)
    del r1["wall_time_s"], r2["wall_time_s"]
    assert r1 == r2


def test_cli_mwu_knapsack_fptas_bounds(capsys, tmp_path):
    rng = np.random.default_rng(14)
    g = GroundSet([f"i{j}" for j in range(5)])
    inst = ProblemInstance(
        g, [LinearObjective(rng.uniform(0.2, 1.0, 5)) for _ in range(2)],
        KnapsackSystem(rng.integers(1, 5, size=5), 7))
    path = tmp_path / "ks.json"
    save_instance(inst, path)
    rc, out, _ = run_cli(capsys, [
        "solve", str(path), "--engine", "mwu", "--epsilon", "0.3",
        "--subroutine", "knapsack-fptas", "--subroutine-eps", "0.1"])
    assert rc == 0
    report = json.loads(out)
    assert report["config"]["subroutine"].startswith("knapsack-fptas")
    from robustsets.exact import exact_game_solve
    nu = exact_game_solve(inst).value
    assert report["lower"] - 1e-9 <= nu <= report["upper"] + 1e-9
    assert report["lower"] <= report["value"] <= report["upper"]


def test_cli_lp_engine_rejects_nonlinear(capsys, tmp_path):
    g = GroundSet(["a", "b"])
    inst = ProblemInstance(g, [SubmodularTableObjective([0, 1, 1, 1.5], 2)],
                           UniformMatroid(2, 1))
    path = tmp_path / "table.json"
    save_instance(inst, path)
    rc, _, err = run_cli(capsys, ["solve", str(path), "--engine", "lp"])
    assert rc == 2
    assert "linear" in err


def test_cli_generate_partition_metadata(capsys, tmp_path):
    out_path = tmp_path / "part.json"
    rc, out, _ = run_cli(capsys, [
        "generate", "--kind", "partition",
        "--values", "2,2,2,2,2,2,2,2", "-o", str(out_path)])
    assert rc == 0
    meta = json.loads(out)
    assert meta["alpha"] == pytest.approx(0.8333333333, abs=1e-9)
    inst = load_instance(out_path)
    assert inst.n_elements == 9


def test_cli_generate_partition_rejects_short_input(capsys):
    rc, _, err = run_cli(capsys, ["generate", "--kind", "partition",
                                  "--values", "2,2,2,2,2,2"])
    assert rc == 2


def test_cli_generate_hitting_set_and_random(capsys, tmp_path):
    rc, out, _ = run_cli(capsys, [
        "generate", "--kind", "hitting-set", "--elements", "a,b",
        "--subsets", "a;b", "--rank", "1"])
    assert rc == 0
    doc = json.loads(out)
    assert doc["instance"]["system"] == {"kind": "uniform", "rank": 1}

    rc, out, _ = run_cli(capsys, [
        "generate", "--kind", "hitting-set", "--random", "6", "3", "2",
        "--seed", "5"])
    assert rc == 0
    inst = instance_from_json(json.loads(out)["instance"])
    assert inst.n_objectives == 3
    blob = dumps_canonical(instance_to_json(inst))
    assert dumps_canonical(
        instance_to_json(instance_from_json(json.loads(blob)))) == blob


def test_cli_sparsify(capsys, tmp_path, intro_file, intro_instance):
    strategy = MixedStrategy([({0}, 0.25), ({1}, 0.25),
                              (frozenset(), 0.5)])
    spath = tmp_path / "strategy.json"
    spath.write_text(json.dumps(strategy_to_json(strategy,
                                                 intro_instance.ground)))
    rc, out, _ = run_cli(capsys, ["sparsify", str(spath), intro_file])
    assert rc == 0
    report = json.loads(out)
    assert report["support_after"] <= 2
    assert report["value_after"] >= report["value_before"] - 1e-9


def test_cli_decompose(capsys, intro_file):
    rc, out, _ = run_cli(capsys, ["decompose", intro_file,
                                  "--point", '{"a": 0.5, "b": 0.5}'])
    assert rc == 0
    assert json.loads(out)["support"] == 2


def test_cli_decompose_outside_point(capsys, intro_file):
    rc, _, err = run_cli(capsys, ["decompose", intro_file,
                                  "--point", '{"a": 0.9, "b": 0.9}'])
    assert rc == 2


def test_cli_check(capsys, intro_file):
    rc, out, _ = run_cli(capsys, ["check", intro_file])
    assert rc == 0
    assert json.loads(out)["ok"] is True


def test_cli_missing_file(capsys):
    rc, _, err = run_cli(capsys, ["solve", "/nonexistent.json"])
    assert rc == 2


def test_cli_trace_stream(capsys, tmp_path, intro_file):
    trace_path = tmp_path / "trace.jsonl"
    rc, out, _ = run_cli(capsys, ["solve", intro_file, "--engine", "mwu",
                                  "--epsilon", "0.45",
                                  "--trace", str(trace_path)])
    assert rc == 0
    lines = trace_path.read_text().strip().splitlines()
    assert json.loads(out)["config"]["T"] == len(lines)
