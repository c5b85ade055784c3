#!/usr/bin/env python3
"""Regenerate figure panels from experiment CSV outputs.

Reads only the documented CSV schemas — summary tables (``N, error, slope``),
mode snapshots (``t, k, re, im``), and vorticity snapshots (``x1, x2,
omega``) — and writes PNG files. Input files are never modified.

    figures.py --all --in RUNS_DIR --out FIG_DIR

expects RUNS_DIR to hold one subdirectory per experiment, as
``speclab run <name> --out RUNS_DIR/<name>`` writes them, and produces six
files in FIG_DIR:

    rate_smooth.png              error vs N for burgers-smooth-rate
    instability_growth.png       growth product vs N for burgers-postshock-tv
    rate_sv.png                  error vs N for burgers-sv
    mode_history_resolved.png    mode spectra per snapshot, linear-resolved-decay
    mode_history_instability.png mode spectra per snapshot, linear-weak-instability
    vorticity.png                filled vorticity contours from a 2D snapshot
"""

from __future__ import annotations

import argparse
import csv
import glob
import os
import re
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

REQUIRED_COLUMNS = {
    "rate": ("N", "error"),
    "modes": ("t", "k", "re", "im"),
    "vorticity": ("x1", "x2", "omega"),
}


# -- CSV readers (the only way data enters this module) --

def _read_rows(path: str, required: tuple) -> list:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh, skipinitialspace=True)
        names = reader.fieldnames or []
        missing = [c for c in required if c not in names]
        if missing:
            raise ValueError(f"{path}: missing column(s): {', '.join(missing)}")
        return list(reader)


def read_summary(path: str):
    """Degrees and positive errors from a summary table, in row order."""
    ns, errors = [], []
    for row in _read_rows(path, REQUIRED_COLUMNS["rate"]):
        if not row["error"]:
            continue  # failed member: error cell is empty
        value = float(row["error"])
        if value > 0.0:
            ns.append(int(row["N"]))
            errors.append(value)
    return np.array(ns, dtype=float), np.array(errors)


def read_modes(path: str):
    """Map snapshot time -> (k >= 1 wavenumbers, |imaginary part| per mode)."""
    series = {}
    for row in _read_rows(path, REQUIRED_COLUMNS["modes"]):
        k = int(row["k"])
        if k < 1:
            continue
        series.setdefault(float(row["t"]), []).append((k, abs(float(row["im"]))))
    out = {}
    for t, pairs in series.items():
        pairs.sort()
        out[t] = (np.array([k for k, _ in pairs], dtype=float),
                  np.array([m for _, m in pairs]))
    return out


def read_vorticity(path: str):
    """Grid axes and the vorticity array W[i, j] at (x1[i], x2[j])."""
    rows = _read_rows(path, REQUIRED_COLUMNS["vorticity"])
    x1 = sorted({float(r["x1"]) for r in rows})
    x2 = sorted({float(r["x2"]) for r in rows})
    index1 = {v: i for i, v in enumerate(x1)}
    index2 = {v: i for i, v in enumerate(x2)}
    W = np.full((len(x1), len(x2)), np.nan)
    for r in rows:
        W[index1[float(r["x1"])], index2[float(r["x2"])]] = float(r["omega"])
    if np.isnan(W).any():
        raise ValueError(f"{path}: grid is incomplete (missing x1/x2 combinations)")
    return np.array(x1), np.array(x2), W


# -- fitted-rate annotation --

def fitted_rate(ns, errors):
    """Least-squares exponent p in error ~ N^-p; None with fewer than 3 points."""
    if len(ns) < 3:
        return None
    slope = np.polyfit(np.log(ns), np.log(errors), 1)[0]
    return -float(slope)


def rate_label(ns, errors):
    rate = fitted_rate(ns, errors)
    return None if rate is None else f"rate {rate:.2f}"


# -- plot operations --

def _apply_scales(ax, scales):
    ax.set_xscale(scales[0])
    ax.set_yscale(scales[1])


def plot_rate(csv_path: str, out_path: str, title: str = "",
              scales=("log", "log")) -> str:
    """Error against N with the fitted rate annotated (3+ points only)."""
    ns, errors = read_summary(csv_path)
    fig, ax = plt.subplots(figsize=(4.5, 3.4))
    _apply_scales(ax, scales)
    ax.plot(ns, errors, "o-")
    label = rate_label(ns, errors)
    if label is not None:
        ax.text(0.05, 0.08, label, transform=ax.transAxes)
    ax.set_xlabel("N")
    ax.set_ylabel("error")
    ax.set_title(title or os.path.basename(os.path.dirname(csv_path)))
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_mode_history(csv_path: str, out_path: str, title: str = "",
                      scales=("log", "log")) -> str:
    """One panel per snapshot time: |imaginary part| of each retained mode."""
    series = read_modes(csv_path)
    times = sorted(series)
    panels = max(1, len(times))
    fig, axes = plt.subplots(1, panels, figsize=(3.1 * panels, 3.0),
                             squeeze=False, sharey=True)
    if not times:
        ax = axes[0][0]
        ax.set_xlabel("k")
        ax.set_ylabel("|Im u_k|")
        ax.set_title("empty series")
    for ax, t in zip(axes[0], times):
        k, mag = series[t]
        shown = mag > 0
        _apply_scales(ax, scales)
        ax.plot(k[shown], mag[shown], ".-", markersize=3)
        ax.set_xlabel("k")
        ax.set_title(f"t = {t:g}")
    if times:
        axes[0][0].set_ylabel("|Im u_k|")
    fig.suptitle(title or os.path.basename(os.path.dirname(csv_path)))
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_vorticity(csv_path: str, out_path: str, title: str = "",
                   scales=("linear", "linear")) -> str:
    """Filled contours of the vorticity snapshot (single color if constant)."""
    x1, x2, W = read_vorticity(csv_path)
    fig, ax = plt.subplots(figsize=(4.4, 3.6))
    _apply_scales(ax, scales)
    spread = float(W.max() - W.min())
    if spread <= 1e-12 * max(1.0, float(np.abs(W).max())):
        center = float(W.mean())
        levels = np.linspace(center - 1.0, center + 1.0, 3)
        filled = ax.contourf(x1, x2, W.T, levels=levels)
    else:
        filled = ax.contourf(x1, x2, W.T, levels=21)
    fig.colorbar(filled, ax=ax)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_aspect("equal")
    ax.set_title(title or os.path.basename(os.path.dirname(csv_path)))
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


_PLOTTERS = {"rate": plot_rate, "modes": plot_mode_history, "vorticity": plot_vorticity}


# -- figure specifications and the batch driver --

@dataclass(frozen=True)
class FigureSpec:
    name: str
    kind: str  # rate | modes | vorticity
    inputs: tuple  # csv paths
    scales: tuple  # (x scale, y scale)
    output: str

    def validate(self) -> None:
        """Inputs exist and carry the expected header columns."""
        for path in self.inputs:
            if not os.path.isfile(path):
                raise ValueError(f"{self.name}: input not found: {path}")
            _read_rows(path, REQUIRED_COLUMNS[self.kind])

    def render(self) -> str:
        return _PLOTTERS[self.kind](self.inputs[0], self.output,
                                    title=self.name, scales=self.scales)


def _snapshot_csv(run_dir: str, prefix: str) -> str:
    """The highest-degree `{prefix}_N*.csv` under one experiment's output."""
    paths = glob.glob(os.path.join(run_dir, f"{prefix}_N*.csv"))
    tagged = []
    for p in paths:
        match = re.search(rf"{prefix}_N(\d+)\.csv$", p)
        if match:
            tagged.append((int(match.group(1)), p))
    if not tagged:
        raise ValueError(f"no {prefix}_N*.csv under {run_dir}")
    return max(tagged)[1]


def default_specs(in_dir: str, out_dir: str) -> list:
    """The six standard figures over a directory of experiment outputs."""
    def summary(experiment):
        return os.path.join(in_dir, experiment, "summary.csv")

    vorticity_dir = os.path.join(in_dir, "euler2d-taylor-green")
    if not os.path.isdir(vorticity_dir):
        vorticity_dir = os.path.join(in_dir, "euler2d-conserve")
    return [
        FigureSpec("rate_smooth", "rate", (summary("burgers-smooth-rate"),),
                   ("log", "log"), os.path.join(out_dir, "rate_smooth.png")),
        FigureSpec("instability_growth", "rate", (summary("burgers-postshock-tv"),),
                   ("log", "log"), os.path.join(out_dir, "instability_growth.png")),
        FigureSpec("rate_sv", "rate", (summary("burgers-sv"),),
                   ("log", "log"), os.path.join(out_dir, "rate_sv.png")),
        FigureSpec("mode_history_resolved", "modes",
                   (_snapshot_csv(os.path.join(in_dir, "linear-resolved-decay"), "modes"),),
                   ("log", "log"), os.path.join(out_dir, "mode_history_resolved.png")),
        FigureSpec("mode_history_instability", "modes",
                   (_snapshot_csv(os.path.join(in_dir, "linear-weak-instability"), "modes"),),
                   ("log", "log"), os.path.join(out_dir, "mode_history_instability.png")),
        FigureSpec("vorticity", "vorticity",
                   (_snapshot_csv(vorticity_dir, "vorticity"),),
                   ("linear", "linear"), os.path.join(out_dir, "vorticity.png")),
    ]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="regenerate figure panels from experiment CSV outputs")
    parser.add_argument("--all", action="store_true",
                        help="produce the full standard set of figures")
    parser.add_argument("--in", dest="in_dir", required=True, metavar="DIR",
                        help="directory holding one subdirectory per experiment")
    parser.add_argument("--out", dest="out_dir", required=True, metavar="DIR",
                        help="directory to write PNG files into")
    args = parser.parse_args(argv)
    if not args.all:
        parser.error("nothing to do: pass --all")
    try:
        specs = default_specs(args.in_dir, args.out_dir)
        for spec in specs:
            spec.validate()
        os.makedirs(args.out_dir, exist_ok=True)
        for spec in specs:
            print(spec.render())
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
