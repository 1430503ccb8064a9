import json

import pytest

from treeload.cli import main

SCENARIO = {
    "scenario_id": "cli_case",
    "network": {"topology": "two_subtree"},
    "task_size_gbit": 1.0,
    "weights": {"time": 0.5, "energy": 0.05},
    "cycles_per_bit": 1.0,
    "repetitions": 0,
    "methods": ["pmo", "local"],
    "sweep": {"parameter": "task_size", "values_gbit": [1.0, 2.0]},
}


def test_generate_then_tree(tmp_path, capsys):
    rc = main(
        [
            "generate", "--nodes", "6", "--edge-prob", "0.5", "--seed", "4",
            "--out", str(tmp_path), "--name", "n6",
        ]
    )
    assert rc == 0
    net_file = tmp_path / "n6.json"
    assert net_file.exists()
    capsys.readouterr()

    rc = main(["tree", "--network", str(net_file)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "(master)" in out
    assert "subtrees rooted at" in out


def test_tree_from_named_topology(capsys):
    assert main(["tree", "--topology", "deep_chain"]) == 0
    out = capsys.readouterr().out
    assert out.count("GHz") == 6


def test_tree_prints_children_under_their_parent(capsys):
    assert main(["tree", "--topology", "two_subtree"]) == 0
    out = capsys.readouterr().out
    ids = [
        int(line.strip().split(":")[0])
        for line in out.splitlines()
        if "GHz" in line
    ]
    # depth-first order, not level order
    assert ids == [0, 1, 3, 5, 6, 2, 4, 7]


def test_tree_rejects_directory_path(tmp_path, capsys):
    rc = main(["tree", "--network", str(tmp_path)])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_tree_requires_exactly_one_source(capsys):
    rc = main(["tree", "--topology", "mixed", "--nodes", "4"])
    assert rc == 2
    assert "exactly one" in capsys.readouterr().err


def test_solve_writes_record(tmp_path, capsys):
    rc = main(
        [
            "solve", "--topology", "mixed", "--method", "pmo",
            "--out", str(tmp_path), "--format", "csv",
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "cost J" in out
    csv = (tmp_path / "mixed_pmo.csv").read_text().splitlines()
    assert len(csv) == 2
    assert csv[0].startswith("scenario_id,method")


def test_solve_rejects_unknown_method(capsys):
    rc = main(["solve", "--topology", "mixed", "--method", "oracle"])
    assert rc == 2
    assert "unknown method" in capsys.readouterr().err


def test_solve_np_needs_threshold(capsys):
    rc = main(["solve", "--topology", "mixed", "--method", "np+pmo"])
    assert rc == 2
    assert "theta-p" in capsys.readouterr().err


def test_solve_reports_the_requested_method(capsys):
    rc = main(
        ["solve", "--topology", "mixed", "--method", "np+pmo",
         "--theta-p", "0.3"]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "method      np+pmo" in out


def test_solve_cache_roundtrip(tmp_path, capsys):
    cache = tmp_path / "plan.json"
    rc = main(
        ["solve", "--topology", "deep_chain", "--method", "pmo",
         "--cache", str(cache)]
    )
    assert rc == 0
    first = capsys.readouterr().out
    assert "cached plan" in first
    rc = main(
        ["solve", "--topology", "deep_chain", "--method", "pmo",
         "--task-gbit", "3", "--cache", str(cache)]
    )
    assert rc == 0
    second = capsys.readouterr().out
    assert "reusing cached plan" in second
    assert "+scaled" in second

    def cost_of(text):
        line = next(l for l in text.splitlines() if l.startswith("cost J"))
        return float(line.split()[-1])

    assert cost_of(second) == pytest.approx(3 * cost_of(first), rel=1e-6)


def test_compare_runs_base_point_only(tmp_path, capsys):
    scen = tmp_path / "case.json"
    scen.write_text(json.dumps(SCENARIO))
    rc = main(
        ["compare", "--scenario", str(scen), "--out", str(tmp_path), "--format", "json"]
    )
    assert rc == 0
    rows = json.loads((tmp_path / "cli_case.json").read_text())
    # sweep stripped: one record per method
    assert [r["method"] for r in rows] == ["pmo", "local"]
    assert all(r["sweep_param"] is None for r in rows)


def test_sweep_runs_every_point(tmp_path, capsys):
    scen = tmp_path / "case.json"
    scen.write_text(json.dumps(SCENARIO))
    rc = main(
        ["sweep", "--scenario", str(scen), "--out", str(tmp_path), "--format", "csv"]
    )
    assert rc == 0
    rows = (tmp_path / "cli_case_sweep.csv").read_text().splitlines()
    assert len(rows) == 1 + 4  # 2 points x 2 methods
    assert "task_size" in rows[1]


def test_sweep_rejects_sweepless_scenario(tmp_path, capsys):
    doc = dict(SCENARIO)
    del doc["sweep"]
    scen = tmp_path / "case.json"
    scen.write_text(json.dumps(doc))
    rc = main(["sweep", "--scenario", str(scen)])
    assert rc == 2
    assert "no sweep" in capsys.readouterr().err


def test_bad_scenario_reports_fields(tmp_path, capsys):
    scen = tmp_path / "bad.json"
    scen.write_text(json.dumps({"network": {}, "methods": ["warp"]}))
    rc = main(["compare", "--scenario", str(scen)])
    assert rc == 2
    err = capsys.readouterr().err
    assert "network" in err and "warp" in err


def test_verify_passes_on_clean_instance(capsys):
    rc = main(["verify", "--topology", "two_subtree", "--method", "cmo"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out
    assert "[FAIL]" not in out


def test_verify_solo_generated_network(capsys):
    rc = main(["verify", "--nodes", "5", "--seed", "2", "--method", "pmo"])
    assert rc == 0
    assert "checks passed" in capsys.readouterr().out
