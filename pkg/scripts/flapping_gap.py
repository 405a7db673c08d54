#!/usr/bin/env python3
"""Scalar-vs-interval flapping gap and the coupled-convergence check.

Runs the two-resource flapping construction for a small and a large
population (the steady per-period cost gap approaches the target J as
the population grows), then the coupled-trajectory contraction check
for the windowless envelope scheme.  CSVs for the two flapping arms are
written under results/flapping/.

Pass CLI arguments to run a single subcommand with custom flags instead.
"""

import sys

from intervalsig.cli import main

DEFAULT_RUNS = [
    ["flapping-demo", "--J", "7", "--N", "3", "--horizon", "40",
     "--out", "results/flapping/j7n3"],
    ["flapping-demo", "--J", "7", "--N", "101", "--horizon", "40",
     "--out", "results/flapping/j7n101"],
    ["convergence-check", "--N", "20", "--M", "2",
     "--trajectories", "2000", "--horizon", "200", "--seed", "0"],
]


def run_defaults() -> int:
    for argv in DEFAULT_RUNS:
        print("$ intervalsig " + " ".join(argv))
        code = main(argv)
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]) if len(sys.argv) > 1 else run_defaults())
