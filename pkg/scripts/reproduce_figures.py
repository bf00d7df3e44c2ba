"""Write the figure data tables (fig2.csv .. fig6.csv).

Usage: python3 scripts/reproduce_figures.py [--trials N] [--seed S] [--jobs J] [--output DIR]

The Monte Carlo tables (fig5, fig6) dominate the runtime: roughly
0.2 s per trial and hypothesis per configuration on one core.
"""

import argparse
import time
from pathlib import Path

from gedsense.cli import figure_tables


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", default="figures")
    args = p.parse_args()
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    for name, text in figure_tables(args.trials, args.seed, args.jobs).items():
        (out / name).write_text(text)
        print(f"wrote {out / name}")
    print(f"done in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
