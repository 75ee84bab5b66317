#!/usr/bin/env python3
"""Plot the CSV outputs of ergolab found in this directory."""
import glob
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

here = os.path.dirname(os.path.abspath(__file__))


def load(path):
    return pd.read_csv(path, comment="#")


def save(fig, name):
    fig.tight_layout()
    fig.savefig(os.path.join(here, name + ".png"), dpi=120)
    plt.close(fig)


for path in sorted(glob.glob(os.path.join(here, "*.csv"))):
    name = os.path.splitext(os.path.basename(path))[0]
    df = load(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    if {"empirical", "theory", "t"} <= set(df.columns):
        ax.step(df.t, df.empirical, where="post", label="empirical")
        ax.plot(df.t, df.theory, label="theory")
        ax.set_xlabel("t")
        ax.set_ylabel("CDF")
    elif {"n", "ratio", "ci_lo", "ci_hi", "theory"} <= set(df.columns):
        lo = df.ci_lo / df.theory
        hi = df.ci_hi / df.theory
        ax.errorbar(df.n, df.ratio, yerr=[df.ratio - lo, hi - df.ratio], fmt="o-", label="ratio")
        ax.set_xscale("log")
        ax.set_xlabel("n")
        ax.set_ylabel("estimate / rate")
    elif {"t", "cdf"} <= set(df.columns):
        ax.plot(df.t, df.cdf)
        ax.set_xlabel("t")
        ax.set_ylabel("CDF")
    elif {"n", "w"} <= set(df.columns):
        ax.loglog(df.n, df.w, label="w_n")
        ax.loglog(df.n, df.mu_yn, label="mu(Y_n)")
        ax.set_xlabel("n")
    elif df.shape[1] == 2:
        ax.loglog(df.iloc[:, 0], df.iloc[:, 1], "o-")
        ax.set_xlabel(df.columns[0])
        ax.set_ylabel(df.columns[1])
    else:
        plt.close(fig)
        continue
    ax.set_title(name)
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    save(fig, name)
