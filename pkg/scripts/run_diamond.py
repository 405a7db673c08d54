#!/usr/bin/env python3
"""Diamond scheme comparison: NOW/MEAN/EXTREME(5,10,20) over 500 periods.

Writes one CSV per scheme plus summary.csv into results/diamond/ and
prints one summary line per scheme.  The regret column is measured
against the capped one-dimensional reference cost 322.307.

Pass CLI arguments to override the defaults entirely, e.g.

    python3 scripts/run_diamond.py sweep --instance diamond \
        --horizon 1000 --seed 7 --out-dir /tmp/diamond
"""

import sys

from intervalsig.cli import main

DEFAULT = [
    "sweep",
    "--instance", "diamond",
    "--horizon", "500",
    "--seed", "0",
    "--ref-capped", "322.307",
    "--out-dir", "results/diamond",
]

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:] or DEFAULT))
