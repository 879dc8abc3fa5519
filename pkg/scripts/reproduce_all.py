"""Run every reproduction check and write a markdown table (plus JSON) to an output directory.

    python3 scripts/reproduce_all.py --out results/
"""

import argparse
import json
import pathlib
import sys

from obstrukt import reproduce


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("results"))
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    checks = reproduce.run_all(jobs=args.jobs)
    for c in checks:
        print(c.line())
    (args.out / "report.md").write_text(reproduce.report_markdown(checks, timings=True), encoding="utf-8")
    (args.out / "report.json").write_text(
        json.dumps([c.to_json() for c in checks], indent=2, ensure_ascii=False, default=str) + "\n",
        encoding="utf-8")
    failed = [c.id for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} passed" + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
