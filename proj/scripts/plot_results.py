#!/usr/bin/env python3
"""Plot result.csv tables produced by mlnlab runs.

Usage: plot_results.py <run-dir> [...]   (a run dir holds result.csv)
Writes <run-dir>/plot.png for the experiments it knows how to draw.
"""
import csv
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(run):
    with open(run / "result.csv", newline="") as f:
        rows = list(csv.reader(f))
    header, data = rows[0], rows[1:]
    report = {}
    rp = run / "report.json"
    if rp.exists():
        report = json.loads(rp.read_text())
    return header, data, report


def plot_scan(run, header, data, report):
    lam = [float(r[0]) for r in data]
    s = [float(r[1]) for r in data]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lam, s, "o-")
    ax.axhline(0, color="k", lw=0.5)
    for key, style in (("lambda_1_s", ":"), ("lambda_1", "--")):
        if key in report:
            ax.axvline(report[key], color="gray", ls=style, label=key)
    if "plateau_value" in report:
        ax.axhline(report["plateau_value"], color="tab:green", ls=":", label="plateau")
    ax.set_xlabel("lambda")
    ax.set_ylabel("S_HL(lambda)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(run / "plot.png", dpi=150)


def plot_loglog(run, header, data, xcol, ycols):
    fig, ax = plt.subplots(figsize=(6, 4))
    x = [float(r[0]) for r in data]
    for j, name in enumerate(header[1:], start=1):
        if name not in ycols:
            continue
        y = [abs(float(r[j])) for r in data]
        ax.loglog(x, y, "o-", label=name)
    ax.set_xlabel(xcol)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(run / "plot.png", dpi=150)


def main():
    for arg in sys.argv[1:]:
        run = Path(arg)
        header, data, report = load(run)
        if header[:2] == ["lambda", "S"]:
            plot_scan(run, header, data, report)
        elif header[0] == "eps":
            plot_loglog(run, header, data, "eps", {"norm_sq", "gag_sq", "lp"})
        elif header[0] == "t":
            plot_loglog(run, header, data, "t", {"g_sq", "g_sq_minus_unorm"})
        elif header[0] == "k":
            plot_loglog(run, header, data, "k", {"local_quotient", "frac_quotient"})
        else:
            print(f"{run}: no plotter for this table", file=sys.stderr)
            continue
        print(f"{run}/plot.png")


if __name__ == "__main__":
    main()
