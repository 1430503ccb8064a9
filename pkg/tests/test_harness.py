import json

import pytest

from treeload import (
    ScenarioError,
    Weights,
    emit_csv,
    emit_json,
    load_records,
    load_scenario,
    run_scenario,
)
from treeload.harness import (
    RunRecord,
    Scenario,
    scenario_from_doc,
)

BASE_DOC = {
    "scenario_id": "t",
    "network": {"topology": "two_subtree"},
    "task_size_gbit": 1.0,
    "weights": {"time": 0.5, "energy": 0.05},
    "cycles_per_bit": 1.0,
    "repetitions": 0,
    "methods": ["pmo"],
}


def doc(**over):
    d = json.loads(json.dumps(BASE_DOC))
    d.update(over)
    return d


def test_doc_parses_and_defaults():
    s = scenario_from_doc(doc())
    assert s.scenario_id == "t"
    assert s.source_kind == "topology"
    assert s.task_size == pytest.approx(1e9)
    assert s.weights == Weights(0.5, 0.05)
    assert s.methods[0].name == "pmo"
    assert s.sweep is None


def test_doc_error_lists_every_problem_at_once():
    bad = doc(
        task_size_gbit=-1,
        repetitions=-3,
        methods=["pmo", "warp"],
    )
    with pytest.raises(ScenarioError) as exc:
        scenario_from_doc(bad)
    msg = str(exc.value)
    assert "task_size_gbit" in msg
    assert "repetitions" in msg
    assert "warp" in msg


def test_doc_requires_np_params():
    with pytest.raises(ScenarioError) as exc:
        scenario_from_doc(doc(methods=["np+pmo"]))
    assert "theta_p" in str(exc.value)
    with pytest.raises(ScenarioError) as exc:
        scenario_from_doc(doc(methods=["lp+cmo"]))
    assert "xi" in str(exc.value)


def test_doc_sweep_validation():
    with pytest.raises(ScenarioError) as exc:
        scenario_from_doc(
            doc(sweep={"parameter": "link_rate", "values_gbps": [1, 2]})
        )
    assert "edge" in str(exc.value)

    with pytest.raises(ScenarioError) as exc:
        scenario_from_doc(doc(sweep={"parameter": "cpu_freq", "values_ghz": [1]}))
    assert "node" in str(exc.value)

    with pytest.raises(ScenarioError) as exc:
        scenario_from_doc(doc(sweep={"parameter": "theta_p", "values": [0.1]}))
    assert "np+" in str(exc.value)

    with pytest.raises(ScenarioError) as exc:
        scenario_from_doc(doc(sweep={"parameter": "subtree_count", "values": [2]}))
    assert "generated" in str(exc.value)

    with pytest.raises(ScenarioError) as exc:
        scenario_from_doc(doc(sweep={"parameter": "humidity", "values": [1]}))
    assert "humidity" in str(exc.value)


def test_doc_network_variants():
    s = scenario_from_doc(doc(network={"file": "somewhere.json"}))
    assert s.source_kind == "file"
    s = scenario_from_doc(
        doc(network={"generate": {"node_count": 4, "edge_prob": 0.5}})
    )
    assert s.source_kind == "generate"
    with pytest.raises(ScenarioError):
        scenario_from_doc(doc(network={"topology": "moebius"}))
    with pytest.raises(ScenarioError):
        scenario_from_doc(doc(network={}))


def test_load_scenario_defaults_id_to_stem(tmp_path):
    d = doc()
    del d["scenario_id"]
    p = tmp_path / "night_run.json"
    p.write_text(json.dumps(d))
    assert load_scenario(p).scenario_id == "night_run"


def test_run_scenario_solo_master_local():
    s = scenario_from_doc(
        doc(
            network={"generate": {"node_count": 1, "edge_prob": 1.0}},
            methods=["local"],
        )
    )
    records = run_scenario(s)
    assert len(records) == 1
    r = records[0]
    assert r.method == "local"
    assert r.allocation == (1e9,)
    assert r.cost > 0


def test_run_scenario_deterministic_and_ordered():
    s = scenario_from_doc(doc(methods=["local", "pmo", "master_worker"]))
    a = run_scenario(s)
    b = run_scenario(s)
    assert [r.method for r in a] == ["local", "pmo", "master_worker"]
    assert [r.cost for r in a] == [r.cost for r in b]
    assert [r.allocation for r in a] == [r.allocation for r in b]


def test_run_scenario_records_full_length_rows_after_pruning():
    s = scenario_from_doc(
        doc(methods=[{"name": "np+pmo", "params": {"theta_p": 1.0}}])
    )
    (r,) = run_scenario(s)
    # pruning removed every helper, yet the record spans the whole network
    assert len(r.allocation) == 8
    assert r.allocation[0] == pytest.approx(1e9)
    assert sum(r.allocation[1:]) == 0.0
    flat = [i for order in r.orders for i in order]
    assert sorted(flat) == list(range(1, 8))


def test_task_size_sweep_scales_costs_proportionally():
    s = scenario_from_doc(
        doc(sweep={"parameter": "task_size", "values_gbit": [1, 2, 4]})
    )
    records = run_scenario(s)
    assert [r.sweep_value for r in records] == [1, 2, 4]
    assert records[1].cost == pytest.approx(2 * records[0].cost, rel=1e-9)
    assert records[2].cost == pytest.approx(4 * records[0].cost, rel=1e-9)


def test_link_rate_sweep_touches_named_edge():
    s = scenario_from_doc(
        doc(
            methods=["pmo"],
            sweep={
                "parameter": "link_rate",
                "edge": [0, 1],
                "values_gbps": [0.3, 10.0],
            },
        )
    )
    slow, fast = run_scenario(s)
    assert slow.cost > fast.cost


def test_link_rate_sweep_rejects_phantom_edge():
    s = scenario_from_doc(
        doc(
            sweep={
                "parameter": "link_rate",
                "edge": [0, 7],
                "values_gbps": [1.0],
            }
        )
    )
    with pytest.raises(ScenarioError):
        run_scenario(s)


def test_timing_appears_when_repetitions_positive():
    s = scenario_from_doc(doc(methods=["local"], repetitions=2))
    (r,) = run_scenario(s)
    assert r.t_exe is not None and r.t_exe >= 0.0
    s0 = scenario_from_doc(doc(methods=["local"], repetitions=0))
    (r0,) = run_scenario(s0)
    assert r0.t_exe is None


def test_csv_layout_and_byte_stability(tmp_path):
    s = scenario_from_doc(doc(methods=["local", "pmo"]))
    records = run_scenario(s)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(records, p1)
    emit_csv(run_scenario(s), p2)
    assert p1.read_bytes() == p2.read_bytes()
    head = p1.read_text().splitlines()[0]
    assert head == (
        "scenario_id,method,sweep_param,sweep_value,cost_J,"
        "max_T_total_s,max_E_total_J,T_exe_s,y_0,y_1,y_2,y_3,y_4,y_5,y_6,y_7"
    )
    assert len(p1.read_text().splitlines()) == len(records) + 1


def test_csv_empty_records_header_only(tmp_path):
    p = tmp_path / "empty.csv"
    emit_csv([], p)
    lines = p.read_text().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith("scenario_id,")


def test_csv_pads_mixed_widths(tmp_path):
    small = RunRecord(
        scenario_id="s", method="local", sweep_param=None, sweep_value=None,
        cost=1.0, max_time=1.0, max_energy=0.0, t_exe=None,
        allocation=(1.0, 0.0), orders=((1,),), solver_tag="baseline-local",
    )
    wide = RunRecord(
        scenario_id="w", method="local", sweep_param=None, sweep_value=None,
        cost=1.0, max_time=1.0, max_energy=0.0, t_exe=None,
        allocation=(1.0, 0.0, 0.0, 0.0), orders=((1, 2, 3),), solver_tag="baseline-local",
    )
    p = tmp_path / "mix.csv"
    emit_csv([small, wide], p)
    rows = p.read_text().splitlines()
    assert rows[0].endswith("y_0,y_1,y_2,y_3")
    assert rows[1].split(",")[8:] == ["1", "0", "", ""]


def test_json_roundtrip(tmp_path):
    s = scenario_from_doc(doc(methods=["pmo", "local"]))
    records = run_scenario(s)
    p = tmp_path / "r.json"
    emit_json(records, p)
    back = load_records(p)
    assert back == records


def test_float_format_uses_12_significant_digits(tmp_path):
    s = scenario_from_doc(doc(methods=["pmo"]))
    records = run_scenario(s)
    emit_csv(records, tmp_path / "f.csv")
    row = (tmp_path / "f.csv").read_text().splitlines()[1]
    cost_field = row.split(",")[4]
    assert float(cost_field) == pytest.approx(records[0].cost, rel=1e-11)
    assert len(cost_field.replace(".", "").replace("-", "").lstrip("0")) <= 12
