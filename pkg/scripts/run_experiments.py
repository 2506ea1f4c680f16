#!/usr/bin/env python3
"""Run every headline experiment through the CLI and collect the outputs.

Produces, under the output directory (default ./out):

  compare_*            full-vs-effective trace pairs at the four reference
                       parameter sets (two coupling splits, both signs of
                       the second cavity frequency)
  scaling_oat/tat      maximal squeezing vs atom number with log-log fits
  chi_scan             maximal squeezing vs chi at N = 100
  omega0_tat           omega_0 sweep at chi = -1 over the default wide grid
  omega0_chi*          omega_0 sweeps on the fine grid where the
                       enhancement dips live (chi = 0, -0.05, -0.5)
  estimate             laboratory-unit estimates (MHz, ns)

Every run also leaves a JSON summary carrying the full parameter record.
"""

import argparse
import sys

from spintwist.cli import main as cli


def run(argv):
    print("+ spintwist " + " ".join(argv))
    code = cli(argv)
    if code != 0:
        sys.exit(f"command failed with exit code {code}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out")
    parser.add_argument("--quick", action="store_true",
                        help="coarser grids for a fast smoke run")
    args = parser.parse_args()
    out = ["--out-dir", args.out_dir]

    points = ["--points", "401"] if args.quick else []
    n_grid = "20:200:60" if args.quick else "20:200:10"

    for tag, omega_b, l1, l2, n in [
        ("a", "200", "2", "1", "15"),
        ("b", "-200", "2", "1", "15"),
        ("c", "200", "1", "2", "20"),
        ("d", "-200", "1", "2", "20"),
    ]:
        run(["compare", "--omega-a", "200", "--omega-b", omega_b,
             "--lambda1", l1, "--lambda2", l2, "--n", n,
             "--out", f"compare_{tag}", *out, *points])

    run(["sweep-n", "--chi", "0", "--n", n_grid, "--out", "scaling_oat", *out, *points])
    run(["sweep-n", "--chi", "-1", "--n", n_grid, "--out", "scaling_tat", *out, *points])

    chi_grid = "-1:0:11" if args.quick else "-1:0:21"
    run(["sweep-chi", "--n", "100", f"--chi-grid={chi_grid}", "--out", "chi_scan",
         *out, *points])

    run(["sweep-omega0", "--n", "100", "--chi", "-1", "--out", "omega0_tat",
         *out, *points])
    fine = "0:10:11" if args.quick else "0:10:21"
    for chi, tag in [("0", "goat"), ("-0.05", "chi005"), ("-0.5", "chi05")]:
        run(["sweep-omega0", "--n", "100", "--chi", chi, f"--omega0-grid={fine}",
             "--out", f"omega0_{tag}", *out, *points])

    run(["estimate-physical", "--out", "estimate", *out, *points])
    print("all experiments complete; data in", args.out_dir)


if __name__ == "__main__":
    main()
