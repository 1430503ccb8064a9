"""Threshold behavior of the two_subtree topology.

Two sweeps around node 1: starve its ingress link and its subtree is
abandoned outright; grow its cpu frequency and its share switches on
past a threshold, then climbs.
"""

from pathlib import Path

from treeload import load_scenario, named_topology, run_scenario

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    topo = named_topology("two_subtree")
    tree = topo.tree
    root = tree.to_original.index(1)
    members = [tree.to_original[i] for i in tree.subtrees[root]]

    recs = run_scenario(load_scenario(ROOT / "scenarios" / "rate_sweep.json"))
    print("link rate master->1 vs allocation into node 1's subtree")
    print(f"{'Gbps':>8} {'subtree share':>14} {'cost J':>12}")
    for r in recs:
        if r.sweep_param != "link_rate":
            continue
        share = sum(r.allocation[m] for m in members) / sum(r.allocation)
        print(f"{r.sweep_value:>8.1f} {share:>14.4f} {r.cost:>12.6f}")

    print()
    recs = run_scenario(load_scenario(ROOT / "scenarios" / "freq_sweep.json"))
    print("cpu frequency of node 1 vs its own share")
    print(f"{'GHz':>8} {'node 1 share':>14} {'cost J':>12}")
    for r in recs:
        if r.sweep_param != "cpu_freq":
            continue
        share = r.allocation[1] / sum(r.allocation)
        print(f"{r.sweep_value:>8.2f} {share:>14.4f} {r.cost:>12.6f}")


if __name__ == "__main__":
    main()
