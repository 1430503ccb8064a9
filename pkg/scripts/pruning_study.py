"""Quality/speed trade-off of the two pruning heuristics.

Drives the prune_theta and prune_depth scenarios, then reports each
sweep point relative to its exact reference: how much cost the pruned
solve gives up and how much wall time it saves.
"""

from pathlib import Path

from treeload import load_scenario, run_scenario

ROOT = Path(__file__).resolve().parent.parent


def rows(name: str):
    recs = run_scenario(load_scenario(ROOT / "scenarios" / f"{name}.json"))
    return [r for r in recs if r.sweep_param is not None]


def main() -> None:
    theta = rows("prune_theta")
    ref = theta[0]  # theta_p = 0 keeps every useful node: the exact answer
    print("node pruning, 8-server random network (reference: theta_p = 0)")
    print(f"{'theta_p':>8} {'cost J':>12} {'vs ref':>8} {'speedup':>8}")
    for r in theta:
        up = r.cost / ref.cost - 1.0
        speed = ref.t_exe / r.t_exe if r.t_exe else float("nan")
        print(f"{r.sweep_value:>8.2f} {r.cost:>12.6f} {up:>7.1%} {speed:>7.1f}x")

    print()
    depth = rows("prune_depth")
    full = depth[-1]  # xi = height retains the whole tree
    print("level pruning, deep chain (reference: xi = height)")
    print(f"{'xi':>8} {'cost J':>12} {'vs full':>8}")
    for r in depth:
        print(f"{r.sweep_value:>8.0f} {r.cost:>12.6f} {r.cost / full.cost - 1.0:>7.1%}")


if __name__ == "__main__":
    main()
