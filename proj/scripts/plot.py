#!/usr/bin/env python3
"""Plots for the CSV files written by the `edg` CLI.

    edg phase ... > phase.csv && scripts/plot.py phase phase.csv phase.png
    edg trace ... > trace.csv && scripts/plot.py trace trace.csv trace.png
    edg bench ... > bench.csv && scripts/plot.py bench bench.csv bench.png
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd


def plot_phase(df, ax):
    grid = df.pivot(index="rank", columns="rho", values="success_prob").sort_index(ascending=False)
    im = ax.imshow(grid.values, aspect="auto", cmap="gray", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(grid.shape[1]), [f"{v:g}" for v in grid.columns])
    ax.set_yticks(range(grid.shape[0]), [str(v) for v in grid.index])
    ax.set_xlabel("oversampling factor rho")
    ax.set_ylabel("rank r")
    ax.figure.colorbar(im, ax=ax, label="success probability")


def plot_trace(df, ax):
    for col, label in [("procrustes_err", "Procrustes error"), ("eps", "eps_k"), ("rel_change", "relative change")]:
        y = df[col].replace(0.0, np.nan)
        if y.notna().any():
            ax.semilogy(df["k"], y, marker="o", ms=3, label=label)
    ax.set_xlabel("outer iteration k")
    ax.legend()


def plot_bench(df, ax):
    ax.loglog(df["n"], df["wall_minutes"] * 60.0, marker="o")
    ax.set_xlabel("n")
    ax.set_ylabel("wall time [s]")
    twin = ax.twinx()
    twin.semilogy(df["n"], df["relative_error"], "r--", marker="x")
    twin.set_ylabel("relative error", color="r")


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("kind", choices=["phase", "trace", "bench"])
    parser.add_argument("csv")
    parser.add_argument("out")
    args = parser.parse_args()

    df = pd.read_csv(args.csv)
    fig, ax = plt.subplots(figsize=(6, 4))
    {"phase": plot_phase, "trace": plot_trace, "bench": plot_bench}[args.kind](df, ax)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
