#!/usr/bin/env python3
"""Log-log iteration plots and a summary table for `irls bench` CSV output."""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", nargs="+", help="bench output files")
    ap.add_argument("--x", choices=["inv_eps", "m"], default="inv_eps")
    ap.add_argument("--out", default="bench.png")
    args = ap.parse_args()

    df = pd.concat([pd.read_csv(p) for p in args.csv], ignore_index=True)
    df["inv_eps"] = 1.0 / df["eps"]
    fig, ax = plt.subplots(figsize=(6, 4))
    rows = []
    for (solver, step), g in df.groupby(["solver", "step"]):
        g = g.sort_values(args.x)
        ax.loglog(g[args.x], g["iterations"], marker="o", label=f"{solver} {step}")
        slope = np.polyfit(np.log(g[args.x]), np.log(g["iterations"]), 1)[0]
        rows.append((solver, step, len(g), slope, g["wall_ms"].sum() / 1e3))
    ax.set_xlabel("1/eps" if args.x == "inv_eps" else "m")
    ax.set_ylabel("iterations")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)

    print(f"{'solver':<6} {'step':<6} {'points':>6} {'slope':>7} {'total s':>8}")
    for solver, step, n, slope, secs in rows:
        print(f"{solver:<6} {step:<6} {n:>6} {slope:>7.3f} {secs:>8.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
