#!/usr/bin/env python3
"""Run every scenario in a directory and print a per-target breakdown.

Scenarios are independent, so they can be verified in parallel; the
summary is assembled as a sorted reduction afterwards, which keeps the
output identical for any --jobs value.  Exit code follows the CLI
convention: 0 all pass/skip, 1 failures, 2 rejections without failures.
"""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from amalgam.harness import (HypothesisRejected, load_scenario,
                             verify_scenario, write_report)


def run_one(path: str, grid_scale: int, seed: int | None):
    scn = load_scenario(path)
    if seed is not None:
        scn.seed = seed
    try:
        report = verify_scenario(scn, base_scale=grid_scale)
    except HypothesisRejected as e:
        return {"scenario": scn.name, "target": scn.target,
                "status": "rejected", "reason": str(e)}
    return {"scenario": scn.name, "target": scn.target,
            "status": report.verdict,
            "constant": report.empirical_constant,
            "stability": report.refinement_stability,
            "_report": report}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dir", default="scenarios")
    ap.add_argument("--out", default=None, help="write per-scenario reports here")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--grid-scale", type=int, default=1)
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args(argv)

    paths = sorted(str(p) for p in Path(args.dir).glob("*.json"))
    if not paths:
        print(f"no scenario files under {args.dir}", file=sys.stderr)
        return 3

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(run_one, paths,
                                 [args.grid_scale] * len(paths),
                                 [args.seed] * len(paths)))
    else:
        rows = [run_one(p, args.grid_scale, args.seed) for p in paths]
    rows.sort(key=lambda r: r["scenario"])

    if args.out:
        outdir = Path(args.out)
        for row in rows:
            report = row.pop("_report", None)
            if report is not None:
                write_report(report, outdir, stem=row["scenario"])
        summary = [{k: v for k, v in row.items() if not k.startswith("_")}
                   for row in rows]
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "sweep_summary.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n")

    by_target: dict[str, list[dict]] = {}
    for row in rows:
        by_target.setdefault(row["target"], []).append(row)
    for target in sorted(by_target):
        group = by_target[target]
        statuses = [r["status"] for r in group]
        consts = [r["constant"] for r in group if "constant" in r]
        line = f"{target:<18} {len(group)} scenarios  {'/'.join(statuses)}"
        if consts:
            line += f"  C in [{min(consts):.4g}, {max(consts):.4g}]"
        print(line)

    n_fail = sum(r["status"] not in ("pass", "skip", "rejected") for r in rows)
    n_rej = sum(r["status"] == "rejected" for r in rows)
    print(f"total {len(rows)}: {len(rows) - n_fail - n_rej} pass/skip, "
          f"{n_fail} fail, {n_rej} rejected")
    if n_fail:
        return 1
    return 2 if n_rej else 0


if __name__ == "__main__":
    sys.exit(main())
