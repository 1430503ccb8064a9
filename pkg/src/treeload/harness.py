"""Scenario-driven experiment runner.

A scenario is one JSON document naming a network source, the task and
weights, a list of methods, and optionally a parameter sweep.  Running
it produces one record per (sweep point, method), each re-verified
against the cost model before it is emitted as CSV or JSON.

Allocations and offloading orders in records are reported in the node
ids of the original network graph, not the relabeled sink-tree ids, so
rows from pruned and unpruned methods line up column for column.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable

from .costs import Allocation, Schedule, Weights, system_cost
from .errors import GenerationError, ScenarioError
from .heuristics import (
    GaParams,
    LpParams,
    NpParams,
    baseline_local,
    baseline_master_worker,
    baseline_multi_hop,
    baseline_partial,
    ga,
    level_prune,
    node_prune,
)
from .network import GenParams, NetworkGraph, generate_network, load_network
from .solvers import Solution, cmo, pmo
from .topologies import TOPOLOGIES, named_topology
from .tree import SinkTree, build_sink_tree
from .units import DEFAULT_B, gbit_to_bits, gbps_to_bps, ghz_to_hz

BASELINES = ("local", "partial", "master_worker", "multi_hop")
EXACT = ("cmo", "pmo")
PRUNE_TARGETS = ("cmo", "pmo", "ga")
SWEEP_PARAMS = (
    "task_size",
    "theta_p",
    "xi",
    "link_rate",
    "cpu_freq",
    "subtree_count",
)

# how many consecutive generator seeds to try per subtree-count point
_SUBTREE_SEARCH_BUDGET = 500


@dataclass(frozen=True)
class MethodSpec:
    name: str
    params: dict[str, Any]

    @property
    def pruner(self) -> str | None:
        return self.name.split("+", 1)[0] if "+" in self.name else None

    @property
    def solver(self) -> str:
        return self.name.split("+", 1)[1] if "+" in self.name else self.name


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple[float, ...]
    edge: tuple[int, int] | None = None
    node: int | None = None


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    source_kind: str  # "topology" | "file" | "generate"
    source: Any
    task_size: float
    weights: Weights
    b_comp: float
    methods: tuple[MethodSpec, ...]
    sweep: SweepSpec | None
    repetitions: int
    rng_seed: int


@dataclass(frozen=True)
class RunRecord:
    scenario_id: str
    method: str
    sweep_param: str | None
    sweep_value: float | None
    cost: float
    max_time: float
    max_energy: float
    t_exe: float | None
    allocation: tuple[float, ...]  # indexed by original network node id
    orders: tuple[tuple[int, ...], ...]  # original ids, per subtree
    solver_tag: str


# ---------------------------------------------------------------------------
# scenario loading and validation


def _valid_method(name: str) -> bool:
    if name in EXACT or name in BASELINES or name == "ga":
        return True
    if "+" in name:
        pruner, _, solver = name.partition("+")
        return pruner in ("np", "lp") and solver in PRUNE_TARGETS
    return False


def scenario_from_doc(doc: dict, scenario_id: str = "scenario") -> Scenario:
    """Build a Scenario from a parsed JSON document.

    Collects every problem before failing so the error names all
    offending fields at once.
    """
    problems: list[str] = []
    if not isinstance(doc, dict):
        raise ScenarioError(("document must be a JSON object",))

    sid = doc.get("scenario_id", scenario_id)
    if not isinstance(sid, str) or not sid:
        problems.append("scenario_id: must be a non-empty string")

    net = doc.get("network")
    source_kind, source = "", None
    if not isinstance(net, dict):
        problems.append("network: required object")
    elif "topology" in net:
        source_kind, source = "topology", net["topology"]
        if source not in TOPOLOGIES:
            problems.append(
                f"network.topology: unknown {source!r}, choices {sorted(TOPOLOGIES)}"
            )
    elif "file" in net:
        source_kind, source = "file", str(net["file"])
    elif "generate" in net:
        source_kind = "generate"
        gen = net["generate"]
        if not isinstance(gen, dict):
            problems.append("network.generate: must be an object")
        else:
            try:
                source = GenParams(
                    node_count=gen["node_count"],
                    edge_prob=gen["edge_prob"],
                    rng_seed=gen.get("rng_seed", doc.get("rng_seed", 0)),
                    freq_range_ghz=tuple(gen.get("freq_range_ghz", (1.0, 10.0))),
                    rate_range_gbps=tuple(gen.get("rate_range_gbps", (10.0, 100.0))),
                    gamma=gen.get("gamma", 1e-2),
                    tx_power_dbm=gen.get("tx_power_dbm", 30.0),
                )
            except KeyError as exc:
                problems.append(f"network.generate: missing field {exc}")
            except Exception as exc:
                problems.append(f"network.generate: {exc}")
    else:
        problems.append("network: needs one of topology|file|generate")

    task_gbit = doc.get("task_size_gbit", 1.0)
    if not isinstance(task_gbit, (int, float)) or task_gbit < 0:
        problems.append("task_size_gbit: must be a number >= 0")

    weights = None
    wdoc = doc.get("weights", {"time": 0.5, "energy": 0.05})
    if not isinstance(wdoc, dict) or "time" not in wdoc or "energy" not in wdoc:
        problems.append("weights: needs {time, energy}")
    else:
        try:
            weights = Weights(float(wdoc["time"]), float(wdoc["energy"]))
        except Exception as exc:
            problems.append(f"weights: {exc}")

    b_comp = doc.get("cycles_per_bit", DEFAULT_B)
    if not isinstance(b_comp, (int, float)) or b_comp <= 0:
        problems.append("cycles_per_bit: must be a number > 0")

    reps = doc.get("repetitions", 20)
    if not isinstance(reps, int) or reps < 0:
        problems.append("repetitions: must be an integer >= 0")

    methods: list[MethodSpec] = []
    mdoc = doc.get("methods")
    if not isinstance(mdoc, list) or not mdoc:
        problems.append("methods: required non-empty list")
    else:
        for k, entry in enumerate(mdoc):
            if isinstance(entry, str):
                entry = {"name": entry}
            if not isinstance(entry, dict) or "name" not in entry:
                problems.append(f"methods[{k}]: needs a name")
                continue
            name = entry["name"]
            params = entry.get("params", {})
            if not _valid_method(name):
                problems.append(f"methods[{k}].name: unknown method {name!r}")
                continue
            if not isinstance(params, dict):
                problems.append(f"methods[{k}].params: must be an object")
                continue
            pruner = name.split("+", 1)[0] if "+" in name else None
            if pruner == "np" and "theta_p" not in params:
                problems.append(f"methods[{k}]: np needs params.theta_p")
            if pruner == "lp" and "xi" not in params:
                problems.append(f"methods[{k}]: lp needs params.xi")
            methods.append(MethodSpec(name=name, params=params))

    sweep = None
    sdoc = doc.get("sweep")
    if sdoc is not None:
        if not isinstance(sdoc, dict) or "parameter" not in sdoc:
            problems.append("sweep: needs a parameter")
        else:
            param = sdoc["parameter"]
            if param not in SWEEP_PARAMS:
                problems.append(
                    f"sweep.parameter: unknown {param!r}, choices {SWEEP_PARAMS}"
                )
            else:
                key = {
                    "task_size": "values_gbit",
                    "link_rate": "values_gbps",
                    "cpu_freq": "values_ghz",
                }.get(param, "values")
                raw = sdoc.get(key, sdoc.get("values"))
                if not isinstance(raw, list) or not raw:
                    problems.append(f"sweep.{key}: required non-empty list")
                    raw = []
                edge = node = None
                if param == "link_rate":
                    e = sdoc.get("edge")
                    if (
                        not isinstance(e, list)
                        or len(e) != 2
                        or not all(isinstance(v, int) for v in e)
                    ):
                        problems.append("sweep.edge: required [i, j] for link_rate")
                    else:
                        edge = (e[0], e[1])
                if param == "cpu_freq":
                    n = sdoc.get("node")
                    if not isinstance(n, int):
                        problems.append("sweep.node: required node id for cpu_freq")
                    else:
                        node = n
                if param == "theta_p" and not any(
                    m.pruner == "np" for m in methods
                ):
                    problems.append("sweep theta_p: no np+ method in methods")
                if param == "xi" and not any(m.pruner == "lp" for m in methods):
                    problems.append("sweep xi: no lp+ method in methods")
                if param == "subtree_count" and source_kind != "generate":
                    problems.append(
                        "sweep subtree_count: needs a generated network source"
                    )
                try:
                    values = tuple(float(v) for v in raw)
                except (TypeError, ValueError):
                    problems.append(f"sweep.{key}: values must be numbers")
                    values = ()
                if values:
                    sweep = SweepSpec(
                        parameter=param, values=values, edge=edge, node=node
                    )

    if problems:
        raise ScenarioError(tuple(problems))
    assert weights is not None
    return Scenario(
        scenario_id=sid,
        source_kind=source_kind,
        source=source,
        task_size=gbit_to_bits(float(task_gbit)),
        weights=weights,
        b_comp=float(b_comp),
        methods=tuple(methods),
        sweep=sweep,
        repetitions=reps,
        rng_seed=doc.get("rng_seed", 0),
    )


def load_scenario(path: str | Path) -> Scenario:
    p = Path(path)
    with open(p) as fh:
        doc = json.load(fh)
    return scenario_from_doc(doc, scenario_id=p.stem)


# ---------------------------------------------------------------------------
# network resolution and sweep rewrites


def _base_network(s: Scenario) -> NetworkGraph:
    if s.source_kind == "topology":
        top = named_topology(s.source)
        return top.network
    if s.source_kind == "file":
        return load_network(s.source)
    return generate_network(s.source)


def _with_link_rate(net: NetworkGraph, edge: tuple[int, int], gbps: float) -> NetworkGraph:
    i, j = edge
    if not net.has_link(i, j):
        raise ScenarioError((f"sweep.edge: network has no link {i}-{j}",))
    links = dict(net.links)
    links[(i, j)] = gbps_to_bps(gbps)
    links[(j, i)] = gbps_to_bps(gbps)
    return NetworkGraph(net.servers, links)


def _with_cpu_freq(net: NetworkGraph, node: int, ghz: float) -> NetworkGraph:
    if not 0 <= node < len(net.servers):
        raise ScenarioError((f"sweep.node: no node {node} in network",))
    servers = list(net.servers)
    servers[node] = replace(servers[node], cpu_freq=ghz_to_hz(ghz))
    return NetworkGraph(tuple(servers), net.links)


def _with_subtree_count(s: Scenario, count: int) -> NetworkGraph:
    """First seeded draw whose sink tree has exactly `count` subtrees."""
    base: GenParams = s.source
    for attempt in range(_SUBTREE_SEARCH_BUDGET):
        params = replace(base, rng_seed=base.rng_seed + attempt)
        try:
            net = generate_network(params)
        except GenerationError:
            continue
        tree = build_sink_tree(net)
        if len(tree.subtree_roots) == count:
            return net
    raise GenerationError(
        f"no draw with {count} subtrees within {_SUBTREE_SEARCH_BUDGET} seeds "
        f"of {base.rng_seed}"
    )


# ---------------------------------------------------------------------------
# method dispatch


def _merged(spec: MethodSpec, sweep_param: str | None, value: float) -> dict:
    params = dict(spec.params)
    if sweep_param == "theta_p" and spec.pruner == "np":
        params["theta_p"] = value
    if sweep_param == "xi" and spec.pruner == "lp":
        params["xi"] = int(value)
    return params


def _solve_one(
    spec: MethodSpec,
    tree: SinkTree,
    task_size: float,
    weights: Weights,
    b: float,
    params: dict,
) -> Solution:
    name = spec.solver
    if spec.pruner == "np":
        work, relays = node_prune(
            tree, NpParams(float(params["theta_p"])), task_size, weights, b=b
        )
        forced = relays
    elif spec.pruner == "lp":
        work = level_prune(tree, LpParams(int(params["xi"])))
        forced = frozenset()
    else:
        work, forced = tree, frozenset()

    if name == "cmo":
        return cmo(work, task_size, weights, forced, b=b)
    if name == "pmo":
        return pmo(work, task_size, weights, forced, b=b)
    if name == "ga":
        ga_fields = {
            k: params[k]
            for k in (
                "population",
                "generations",
                "elite_frac",
                "mutation_prob",
                "mutation_op",
                "rng_seed",
            )
            if k in params
        }
        return ga(work, task_size, weights, GaParams(**ga_fields), forced, b=b)
    if name == "local":
        return baseline_local(work, task_size, weights, b=b)
    if name == "partial":
        return baseline_partial(work, task_size, weights, b=b)
    if name == "master_worker":
        return baseline_master_worker(work, task_size, weights, b=b)
    if name == "multi_hop":
        return baseline_multi_hop(work, task_size, weights, b=b)
    raise ScenarioError((f"method {spec.name!r} not dispatchable",))


def _audit_and_record(
    s: Scenario,
    spec: MethodSpec,
    sol: Solution,
    full_tree: SinkTree,
    sweep_param: str | None,
    sweep_value: float | None,
    t_exe: float | None,
) -> RunRecord:
    """Map a solution back to original network ids and re-verify its cost."""
    work = sol.tree
    n = len(full_tree)
    y_net = [0.0] * n
    for i, v in enumerate(sol.allocation.y):
        y_net[work.to_original[i]] = v

    # full-tree schedule: surviving nodes keep their order, removed nodes
    # go last; zero-load rows never change the system maximum
    by_root: dict[int, tuple[int, ...]] = {}
    kept_net = set(work.to_original)
    for root, nodes in zip(work.subtree_roots, sol.schedule.orders):
        net_root = work.to_original[root]
        by_root[net_root] = tuple(work.to_original[i] for i in nodes)
    full_orders = []
    for root in full_tree.subtree_roots:
        net_root_order = by_root.get(full_tree.to_original[root], ())
        tree_order = [full_tree.relabel_map[v] for v in net_root_order]
        rest = [
            i for i in full_tree.subtrees[root] if full_tree.to_original[i] not in kept_net
        ]
        full_orders.append(tuple(tree_order) + tuple(sorted(rest)))
    full_sched = Schedule(orders=tuple(full_orders))

    y_tree = tuple(y_net[full_tree.to_original[i]] for i in range(n))
    alloc = Allocation(y=y_tree, total=sol.task_size)
    check = system_cost(full_tree, full_sched, alloc, sol.weights, sol.b_comp)
    drift = abs(check.j_system - sol.cost)
    if drift > 1e-9 * max(1.0, abs(sol.cost)):
        raise AssertionError(
            f"cost audit failed for {spec.name}: {check.j_system} vs {sol.cost}"
        )

    orders_net = tuple(
        tuple(full_tree.to_original[i] for i in order) for order in full_sched.orders
    )
    return RunRecord(
        scenario_id=s.scenario_id,
        method=spec.name,
        sweep_param=sweep_param,
        sweep_value=sweep_value,
        cost=sol.cost,
        max_time=check.max_time,
        max_energy=check.max_energy,
        t_exe=t_exe,
        allocation=tuple(y_net),
        orders=orders_net,
        solver_tag=sol.solver_tag,
    )


def run_scenario(s: Scenario) -> list[RunRecord]:
    """Execute every (sweep point, method) pair in deterministic order."""
    base_net = None if s.source_kind == "generate" and s.sweep and s.sweep.parameter == "subtree_count" else _base_network(s)

    points: list[float | None]
    if s.sweep is None:
        points = [None]
    else:
        points = list(s.sweep.values)

    records: list[RunRecord] = []
    for value in points:
        net = base_net
        task_size = s.task_size
        if s.sweep is not None and value is not None:
            param = s.sweep.parameter
            if param == "task_size":
                task_size = gbit_to_bits(value)
            elif param == "link_rate":
                assert s.sweep.edge is not None and net is not None
                net = _with_link_rate(net, s.sweep.edge, value)
            elif param == "cpu_freq":
                assert s.sweep.node is not None and net is not None
                net = _with_cpu_freq(net, s.sweep.node, value)
            elif param == "subtree_count":
                net = _with_subtree_count(s, int(value))
        assert net is not None
        tree = build_sink_tree(net)

        for spec in s.methods:
            params = _merged(
                spec, s.sweep.parameter if s.sweep else None, value if value is not None else 0.0
            )
            sol = _solve_one(spec, tree, task_size, s.weights, s.b_comp, params)
            t_exe = None
            if s.repetitions > 0:
                elapsed = 0.0
                for _ in range(s.repetitions):
                    t0 = time.perf_counter()
                    _solve_one(spec, tree, task_size, s.weights, s.b_comp, params)
                    elapsed += time.perf_counter() - t0
                t_exe = elapsed / s.repetitions
            records.append(
                _audit_and_record(
                    s,
                    spec,
                    sol,
                    tree,
                    s.sweep.parameter if s.sweep else None,
                    value,
                    t_exe,
                )
            )
    return records


# ---------------------------------------------------------------------------
# emission


def _fmt(v: float | None) -> str:
    if v is None:
        return ""
    return "%.12g" % v


def emit_csv(records: list[RunRecord], path: str | Path) -> None:
    """Stable-column CSV; float cells carry 12 significant digits."""
    n = max((len(r.allocation) for r in records), default=0)
    header = [
        "scenario_id",
        "method",
        "sweep_param",
        "sweep_value",
        "cost_J",
        "max_T_total_s",
        "max_E_total_J",
        "T_exe_s",
    ] + [f"y_{i}" for i in range(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in records:
            row = [
                r.scenario_id,
                r.method,
                r.sweep_param or "",
                _fmt(r.sweep_value),
                _fmt(r.cost),
                _fmt(r.max_time),
                _fmt(r.max_energy),
                _fmt(r.t_exe),
            ]
            row.extend(_fmt(v) for v in r.allocation)
            row.extend("" for _ in range(n - len(r.allocation)))
            w.writerow(row)


def record_to_doc(r: RunRecord) -> dict:
    return {
        "scenario_id": r.scenario_id,
        "method": r.method,
        "sweep_param": r.sweep_param,
        "sweep_value": r.sweep_value,
        "cost_J": r.cost,
        "max_T_total_s": r.max_time,
        "max_E_total_J": r.max_energy,
        "T_exe_s": r.t_exe,
        "allocation": list(r.allocation),
        "orders": [list(o) for o in r.orders],
        "solver_tag": r.solver_tag,
    }


def record_from_doc(doc: dict) -> RunRecord:
    return RunRecord(
        scenario_id=doc["scenario_id"],
        method=doc["method"],
        sweep_param=doc["sweep_param"],
        sweep_value=doc["sweep_value"],
        cost=doc["cost_J"],
        max_time=doc["max_T_total_s"],
        max_energy=doc["max_E_total_J"],
        t_exe=doc["T_exe_s"],
        allocation=tuple(doc["allocation"]),
        orders=tuple(tuple(o) for o in doc["orders"]),
        solver_tag=doc["solver_tag"],
    )


def emit_json(records: list[RunRecord], path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump([record_to_doc(r) for r in records], fh, indent=2)
        fh.write("\n")


def load_records(path: str | Path) -> list[RunRecord]:
    with open(path) as fh:
        return [record_from_doc(d) for d in json.load(fh)]
