"""Plot the CSV written by ``diffest sweep`` or ``diffest csl``.

Needs matplotlib, which the package itself does not depend on:

    diffest sweep -c maqro.json -o sweep.csv
    python scripts/plot_sweep.py sweep.csv sweep.png
"""

import csv
import sys

import matplotlib.pyplot as plt


def read(path):
    with open(path) as fh:
        rows = list(csv.reader(line for line in fh if not line.startswith("#")))
    return rows[0], rows[1:]


def main(src, dst):
    columns, rows = read(src)
    x = [float(r[0]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, name in enumerate(columns):
        if not (name.startswith("std_") or name.startswith("lambda_min_") or name.startswith("overlay_")):
            continue
        pts = [(xi, float(r[i])) for xi, r in zip(x, rows) if r[i] not in ("degenerate", "na")]
        if pts:
            ax.loglog(*zip(*pts), label=name.split("_", 1)[1] if not name.startswith("lambda_min_") else name[11:])
    ax.set_xlabel(columns[0])
    ax.set_ylabel("lambda_min [1/s]" if columns[1].startswith("lambda_min_") else "std [m^-2 s^-1]")
    ax.legend()
    fig.tight_layout()
    fig.savefig(dst, dpi=150)


if __name__ == "__main__":
    main(*sys.argv[1:3])
