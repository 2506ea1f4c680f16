#!/usr/bin/env python3
"""Render figures from the CSVs produced by scripts/run_experiments.py.

Needs the separate `twistfig` package (renderer/ at the repository root):

    pip install -e renderer/ --no-build-isolation

Rendering only reads the CSV/JSON outputs; nothing is recomputed here.
"""

import argparse
import sys
from pathlib import Path

try:
    from twistfig.cli import main as render
except ImportError:
    sys.exit("twistfig is not installed; run: pip install -e renderer/ --no-build-isolation")


def run(argv):
    print("+ twistfig " + " ".join(argv))
    code = render(argv)
    if code != 0:
        sys.exit(f"render failed with exit code {code}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir", default="out")
    parser.add_argument("--fig-dir", default="figures")
    args = parser.parse_args()
    data = Path(args.data_dir)
    figs = Path(args.fig_dir)
    figs.mkdir(parents=True, exist_ok=True)

    for tag in "abcd":
        run(["trace-compare",
             str(data / f"compare_{tag}_full.csv"),
             str(data / f"compare_{tag}_effective.csv"),
             "-o", str(figs / f"trace_compare_{tag}.svg")])

    run(["scaling", str(data / "scaling_oat.csv"), str(data / "scaling_tat.csv"),
         "-o", str(figs / "scaling.svg")])
    run(["chi-insert", str(data / "chi_scan.csv"), "-o", str(figs / "chi_insert.svg")])
    run(["omega0-family",
         str(data / "omega0_goat.csv"), str(data / "omega0_chi005.csv"),
         str(data / "omega0_chi05.csv"),
         "-o", str(figs / "omega0_family.svg")])
    run(["omega0-family", str(data / "omega0_tat.csv"),
         "-o", str(figs / "omega0_tat.svg")])
    print("figures written to", figs)


if __name__ == "__main__":
    main()
