"""Run every scenario file and write the records under results/.

Outputs are deterministic apart from the T_exe_s column, so reruns can
be diffed after dropping that column.
"""

import argparse
import time
from pathlib import Path

from treeload import emit_csv, emit_json, load_scenario, run_scenario

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenarios", default=ROOT / "scenarios", type=Path)
    ap.add_argument("--out", default=ROOT / "results", type=Path)
    ap.add_argument("--json", action="store_true", help="also write .json records")
    args = ap.parse_args()

    files = sorted(args.scenarios.glob("*.json"))
    if not files:
        raise SystemExit(f"no scenario files under {args.scenarios}")
    args.out.mkdir(parents=True, exist_ok=True)

    for path in files:
        s = load_scenario(path)
        t0 = time.perf_counter()
        records = run_scenario(s)
        dt = time.perf_counter() - t0
        target = args.out / f"{s.scenario_id}.csv"
        emit_csv(records, target)
        if args.json:
            emit_json(records, target.with_suffix(".json"))
        print(f"{s.scenario_id}: {len(records)} records in {dt:.1f}s -> {target}")


if __name__ == "__main__":
    main()
