#!/usr/bin/env python3
"""Plot an SRER-vs-window curve written by `sinemodel sweep --out`.

usage: plot_sweep.py curve.csv [out.png]
"""

import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {"sm": ("SM", "o-"), "edsm": ("EDSM", "s-"), "eaqhm": ("eaQHM", "^-")}


def load(path):
    curves = defaultdict(list)
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            curves[row["model"]].append((float(row["multiple"]), float(row["srer_db"])))
    return {m: sorted(v) for m, v in curves.items()}


def main(argv):
    if len(argv) not in (2, 3):
        sys.exit(__doc__.strip())
    src = argv[1]
    dst = argv[2] if len(argv) == 3 else src.rsplit(".", 1)[0] + ".png"
    fig, ax = plt.subplots(figsize=(6, 4))
    for model, points in load(src).items():
        label, fmt = STYLE.get(model, (model, ".-"))
        xs, ys = zip(*points)
        ax.plot(xs, ys, fmt, label=label)
    ax.set_xlabel("window length (multiples of $T_{min}$)")
    ax.set_ylabel("SRER (dB)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(dst, dpi=150)
    print(dst)


if __name__ == "__main__":
    main(sys.argv)
