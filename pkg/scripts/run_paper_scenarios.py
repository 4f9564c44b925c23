#!/usr/bin/env python3
"""Run the two bundled scenarios end to end and print a short summary.

Writes trajectory.csv and report.json for each scenario under --out
(default: out/<scenario-stem>/). The consistent-cycle scenario must come
out 'surrounded', the inconsistent one 'collapsed'; the process exit code
is nonzero if either expectation fails.
"""

import argparse
import json
import sys
from pathlib import Path

from surroundsim import cli

REPO = Path(__file__).resolve().parents[1]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out", help="output root directory")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    scenarios = [REPO / "scenarios" / name for name in ("paper_fig1.json", "paper_fig2.json")]
    code = cli.main(
        ["simulate", *map(str, scenarios), "--out", args.out, "--jobs", str(args.jobs)]
    )
    for path in scenarios:
        report = json.loads((Path(args.out) / path.stem / "report.json").read_text())
        rep = report["report"]
        print(
            f"{path.stem}: consistency={report['consistency']} "
            f"classification={rep['classification']} "
            f"final_surrounding_error={rep['max_surrounding_error_final']:.3e} "
            f"final_distances={[round(d, 4) for d in rep['final_distances']]}"
        )
    return code


if __name__ == "__main__":
    sys.exit(main())
