"""Command-line front end.

Verbs:
  generate   sample a random network and write it to a JSON file
  tree       print the delivery tree built from a network
  solve      run one method on one instance
  compare    run a scenario's method list at its base point
  sweep      run a scenario's parameter sweep
  verify     solve an instance, then replay the invariant suite on it

`compare` and `sweep` are driven by a scenario file (see
schemas/scenario.schema.json); the other verbs take the instance inline.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from .costs import Weights
from .errors import ParameterError, TreeloadError
from .harness import (
    BASELINES,
    EXACT,
    MethodSpec,
    Scenario,
    _audit_and_record,
    _solve_one,
    emit_csv,
    emit_json,
    load_scenario,
    run_scenario,
)
from .heuristics import GaParams
from .network import GenParams, generate_network, load_network, save_network
from .solvers import load_baseline, save_baseline, scale_solution
from .topologies import TOPOLOGIES, named_topology
from .tree import SinkTree, build_sink_tree
from .units import (
    DEFAULT_CYCLES_PER_GBIT,
    bits_to_gbit,
    bps_to_gbps,
    cycles_per_gbit_to_si,
    gbit_to_bits,
    hz_to_ghz,
)
from .verification import verify_instance

_METHODS = EXACT + ("ga",) + BASELINES


def _add_source_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("instance source (pick one)")
    src.add_argument("--network", metavar="FILE", help="network JSON file")
    src.add_argument(
        "--topology",
        choices=sorted(TOPOLOGIES),
        help="one of the named benchmark topologies",
    )
    src.add_argument(
        "--nodes", type=int, metavar="N", help="generate an N-node random network"
    )
    src.add_argument("--edge-prob", type=float, default=0.35)


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="DIR", help="directory for result files")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    # None means "not given": named topologies then supply their own values
    p.add_argument("--task-gbit", type=float, default=None, help="task size in Gbit")
    p.add_argument("--w1", type=float, default=None, help="completion-time weight")
    p.add_argument("--w2", type=float, default=None, help="energy weight")
    p.add_argument(
        "--cycles-per-gbit",
        type=float,
        default=None,
        help="workload density",
    )


def _add_method_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--method",
        default="cmo",
        help="cmo | pmo | ga | local | partial | master_worker | multi_hop,"
        " optionally prefixed np+ or lp+",
    )
    p.add_argument("--theta-p", type=float, help="pruning benefit threshold for np+")
    p.add_argument("--xi", type=int, help="depth cutoff for lp+")
    p.add_argument("--ga-population", type=int, default=4)
    p.add_argument("--ga-generations", type=int, default=100)
    p.add_argument("--ga-elite-frac", type=float, default=0.2)
    p.add_argument("--ga-mutation-prob", type=float, default=0.05)
    p.add_argument("--ga-mutation-op", choices=("swap", "shuffle"), default="swap")


def _resolve_instance(args) -> tuple:
    """(tree, task_bits, weights, b, label) from the source flags."""
    picked = [
        k for k in ("network", "topology", "nodes") if getattr(args, k) is not None
    ]
    if len(picked) != 1:
        raise ParameterError(
            "pick exactly one instance source: --network, --topology, or --nodes"
        )
    if args.topology is not None:
        topo = named_topology(args.topology)
        task = (
            gbit_to_bits(args.task_gbit) if args.task_gbit is not None else topo.task_size
        )
        weights = Weights(
            args.w1 if args.w1 is not None else topo.weights.w1,
            args.w2 if args.w2 is not None else topo.weights.w2,
        )
        b = (
            cycles_per_gbit_to_si(args.cycles_per_gbit)
            if args.cycles_per_gbit is not None
            else topo.b_comp
        )
        return topo.tree, task, weights, b, args.topology
    task = gbit_to_bits(args.task_gbit if args.task_gbit is not None else 1.0)
    weights = Weights(
        args.w1 if args.w1 is not None else 0.5,
        args.w2 if args.w2 is not None else 0.5,
    )
    b = (
        cycles_per_gbit_to_si(args.cycles_per_gbit)
        if args.cycles_per_gbit is not None
        else cycles_per_gbit_to_si(DEFAULT_CYCLES_PER_GBIT)
    )
    if args.network is not None:
        net = load_network(args.network)
        return build_sink_tree(net), task, weights, b, Path(args.network).stem
    params = GenParams(
        node_count=args.nodes, edge_prob=args.edge_prob, rng_seed=args.seed
    )
    net = generate_network(params)
    return build_sink_tree(net), task, weights, b, f"random-{args.nodes}n-s{args.seed}"


def _method_params(args) -> dict:
    out = {
        "population": args.ga_population,
        "generations": args.ga_generations,
        "elite_frac": args.ga_elite_frac,
        "mutation_prob": args.ga_mutation_prob,
        "mutation_op": args.ga_mutation_op,
        "rng_seed": args.seed,
    }
    if args.theta_p is not None:
        out["theta_p"] = args.theta_p
    if args.xi is not None:
        out["xi"] = args.xi
    return out


def _inline_scenario(label: str, task: float, weights: Weights, b: float) -> Scenario:
    # minimal carrier so the audited record path can be reused for `solve`
    return Scenario(
        scenario_id=label,
        source_kind="topology",
        source=label,
        task_size=task,
        weights=weights,
        b_comp=b,
        methods=(),
        sweep=None,
        repetitions=0,
        rng_seed=0,
    )


def _emit(records, out_dir: str | None, fmt: str, stem: str) -> Path | None:
    if out_dir is None:
        return None
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    path = d / f"{stem}.{fmt}"
    if fmt == "csv":
        emit_csv(records, path)
    else:
        emit_json(records, path)
    return path


def _print_solution(sol, label: str, method: str | None = None) -> None:
    print(f"instance    {label}")
    print(f"method      {method or sol.solver_tag}")
    print(f"cost J      {sol.cost:.9g}")
    print(f"max T (s)   {sol.breakdown.max_time:.9g}")
    print(f"max E (J)   {sol.breakdown.max_energy:.9g}")
    print(f"schedules   {sol.schedules_evaluated} evaluated")
    total = sol.allocation.total
    for i, y in enumerate(sol.allocation.y):
        share = y / total if total > 0 else 0.0
        net_id = sol.tree.to_original[i]
        print(f"  node {net_id:>3}  {bits_to_gbit(y):.6f} Gbit  ({share:7.2%})")


# --- verbs ------------------------------------------------------------------


def _cmd_generate(args) -> int:
    params = GenParams(
        node_count=args.nodes,
        edge_prob=args.edge_prob,
        rng_seed=args.seed,
        freq_range_ghz=tuple(args.freq_range),
        rate_range_gbps=tuple(args.rate_range),
        gamma=args.gamma,
        tx_power_dbm=args.tx_power_dbm,
    )
    net = generate_network(params)
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{args.name}.json"
    save_network(net, path)
    print(f"wrote {path} ({len(net)} nodes, {len(net.links) // 2} links)")
    return 0


def _render_tree(tree: SinkTree) -> str:
    lines = []
    # depth-first so each node prints directly under its parent
    stack = [0]
    while stack:
        i = stack.pop()
        srv = tree.servers[i]
        pad = "  " * tree.depth_of[i]
        link = (
            f" <-{bps_to_gbps(tree.edge_rate[i]):g} Gbps- {tree.to_original[tree.parent[i]]}"
            if i
            else " (master)"
        )
        lines.append(
            f"{pad}{tree.to_original[i]}: f={hz_to_ghz(srv.cpu_freq):g} GHz"
            f" gamma={srv.switched_cap:g} tx={srv.tx_power:g} W{link}"
        )
        stack.extend(reversed(tree.children[i]))
    roots = ", ".join(str(tree.to_original[t]) for t in tree.subtree_roots)
    lines.append(f"subtrees rooted at: {roots or '(none)'}")
    return "\n".join(lines)


def _cmd_tree(args) -> int:
    tree, _, _, _, label = _resolve_instance(args)
    print(f"# {label}")
    print(_render_tree(tree))
    return 0


def _cmd_solve(args) -> int:
    tree, task, weights, b, label = _resolve_instance(args)
    spec = MethodSpec(name=args.method, params=_method_params(args))
    if not _valid_cli_method(spec):
        print(f"error: unknown method {args.method!r}", file=sys.stderr)
        return 2

    sol = None
    shown = None
    if args.cache:
        cached = load_baseline(args.cache, tree, weights, b)
        if cached is not None:
            sol = scale_solution(cached, task)
            print(f"reusing cached plan from {args.cache}")
    if sol is None:
        sol = _solve_one(spec, tree, task, weights, b, spec.params)
        # a cache hit keeps the scaled plan's own tag instead
        shown = spec.name
        if args.cache and spec.name in EXACT:
            save_baseline(args.cache, sol)
            print(f"cached plan at {args.cache}")

    t_exe = None
    if args.reps > 0:
        t0 = time.perf_counter()
        for _ in range(args.reps):
            _solve_one(spec, tree, task, weights, b, spec.params)
        t_exe = (time.perf_counter() - t0) / args.reps

    carrier = _inline_scenario(label, task, weights, b)
    record = _audit_and_record(carrier, spec, sol, tree, None, None, t_exe)
    _print_solution(sol, label, shown)
    if t_exe is not None:
        print(f"T_exe (s)   {t_exe:.6g} (mean of {args.reps})")
    path = _emit([record], args.out, args.format, f"{label}_{spec.name}")
    if path:
        print(f"wrote {path}")
    return 0


def _valid_cli_method(spec: MethodSpec) -> bool:
    if spec.pruner not in (None, "np", "lp"):
        return False
    ok_solver = spec.solver in _METHODS
    if spec.pruner is not None:
        ok_solver = spec.solver in ("cmo", "pmo", "ga")
    if spec.pruner == "np" and "theta_p" not in spec.params:
        raise ParameterError("np+ methods need --theta-p")
    if spec.pruner == "lp" and "xi" not in spec.params:
        raise ParameterError("lp+ methods need --xi")
    return ok_solver


def _cmd_compare(args) -> int:
    s = load_scenario(args.scenario)
    if s.sweep is not None:
        s = replace(s, sweep=None)
    s = _apply_overrides(s, args)
    records = run_scenario(s)
    _report_records(records)
    path = _emit(records, args.out, args.format, s.scenario_id)
    if path:
        print(f"wrote {path}")
    return 0


def _cmd_sweep(args) -> int:
    s = load_scenario(args.scenario)
    if s.sweep is None:
        print("error: scenario has no sweep block", file=sys.stderr)
        return 2
    s = _apply_overrides(s, args)
    records = run_scenario(s)
    _report_records(records)
    path = _emit(records, args.out, args.format, f"{s.scenario_id}_sweep")
    if path:
        print(f"wrote {path}")
    return 0


def _apply_overrides(s: Scenario, args) -> Scenario:
    if args.reps is not None:
        s = replace(s, repetitions=args.reps)
    if args.seed is not None:
        s = replace(s, rng_seed=args.seed)
    return s


def _report_records(records) -> None:
    for r in records:
        point = (
            f" {r.sweep_param}={r.sweep_value:g}" if r.sweep_param is not None else ""
        )
        t = f" T_exe={r.t_exe:.4g}s" if r.t_exe is not None else ""
        print(f"{r.scenario_id}{point} {r.method}: J={r.cost:.9g}{t}")


def _cmd_verify(args) -> int:
    tree, task, weights, b, label = _resolve_instance(args)
    spec = MethodSpec(name=args.method, params=_method_params(args))
    if not _valid_cli_method(spec):
        print(f"error: unknown method {args.method!r}", file=sys.stderr)
        return 2
    sol = _solve_one(spec, tree, task, weights, b, spec.params)
    results = verify_instance(sol)
    bad = 0
    for res in results:
        mark = "PASS" if res.ok else "FAIL"
        detail = f"  ({res.detail})" if res.detail else ""
        print(f"[{mark}] {res.name}{detail}")
        bad += 0 if res.ok else 1
    print(f"{len(results) - bad}/{len(results)} checks passed on {label} / {spec.name}")
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="treeload",
        description="task splitting and offload scheduling over multi-hop trees",
    )
    sub = ap.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("generate", help="sample a random network into a JSON file")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--edge-prob", type=float, default=0.35)
    g.add_argument("--freq-range", type=float, nargs=2, default=(1.0, 10.0),
                   metavar=("LO", "HI"), help="cpu frequency range, GHz")
    g.add_argument("--rate-range", type=float, nargs=2, default=(10.0, 100.0),
                   metavar=("LO", "HI"), help="link rate range, Gbps")
    g.add_argument("--gamma", type=float, default=1e-2)
    g.add_argument("--tx-power-dbm", type=float, default=30.0)
    g.add_argument("--name", default="network", help="output file stem")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", metavar="DIR")
    g.set_defaults(fn=_cmd_generate)

    t = sub.add_parser("tree", help="print the delivery tree for an instance")
    _add_source_flags(t)
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(fn=_cmd_tree, w1=None, w2=None, cycles_per_gbit=None, task_gbit=None)

    so = sub.add_parser("solve", help="run one method on one instance")
    _add_source_flags(so)
    _add_problem_flags(so)
    _add_method_flags(so)
    _add_output_flags(so)
    so.add_argument("--seed", type=int, default=0)
    so.add_argument("--reps", type=int, default=0,
                    help="extra timed re-solves for T_exe")
    so.add_argument("--cache", metavar="FILE",
                    help="baseline cache; matching entries are rescaled, not re-solved")
    so.set_defaults(fn=_cmd_solve)

    c = sub.add_parser("compare", help="run a scenario's methods at the base point")
    c.add_argument("--scenario", required=True, metavar="FILE")
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--reps", type=int, default=None)
    _add_output_flags(c)
    c.set_defaults(fn=_cmd_compare)

    sw = sub.add_parser("sweep", help="run a scenario's parameter sweep")
    sw.add_argument("--scenario", required=True, metavar="FILE")
    sw.add_argument("--seed", type=int, default=None)
    sw.add_argument("--reps", type=int, default=None)
    _add_output_flags(sw)
    sw.set_defaults(fn=_cmd_sweep)

    v = sub.add_parser("verify", help="solve, then replay the invariant suite")
    _add_source_flags(v)
    _add_problem_flags(v)
    _add_method_flags(v)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(fn=_cmd_verify)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except TreeloadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
