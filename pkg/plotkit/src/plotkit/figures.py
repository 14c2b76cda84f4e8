"""Render the four figure kinds from bouquet's CSV artifacts.

Pure post-processing: every number comes from the input files.  Inputs
carrying the ``#ABORTED`` marker are refused before any parsing.

Axes policy (fixed per kind so figure diffs are meaningful):
  hairs      x = [0, 12], y = [-16, 16] (plane window around the bouquet)
  pressure   x = [0, max step + 1], y = data range padded by exactly 10%
  gibbs      x = log10(ratio) range padded 10%, 30 bins, y = counts
  tightness  x = [0, max R + 5], y log-scale [1e-16, 10]
"""

from __future__ import annotations

import csv
import os
from collections import defaultdict
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("hairs", "pressure", "gibbs", "tightness")

_INPUT_FILES = {
    "hairs": "hairs.csv",
    "pressure": "pressure.csv",
    "gibbs": "gibbs.csv",
    "tightness": "tightness.csv",
}


class AbortedInputError(RuntimeError):
    """The input file carries the #ABORTED marker left by a failed run."""


@dataclass(frozen=True)
class FigureJob:
    input_dir: str
    kind: str
    output_path: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind: {self.kind!r}")

    @property
    def input_path(self) -> str:
        return os.path.join(self.input_dir, _INPUT_FILES[self.kind])


def _read_rows(path: str) -> list[dict]:
    with open(path) as fh:
        text = fh.read()
    if "#ABORTED" in text:
        raise AbortedInputError(f"{path} is marked #ABORTED")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    return list(csv.DictReader(lines))


def render(job: FigureJob) -> str:
    """Render one figure; returns the output path."""
    rows = _read_rows(job.input_path)
    fig, ax = plt.subplots(figsize=(7, 5), dpi=120)
    _RENDERERS[job.kind](ax, rows)
    fig.tight_layout()
    fig.savefig(job.output_path)
    plt.close(fig)
    return job.output_path


def _render_hairs(ax, rows):
    by_hair = defaultdict(list)
    for r in rows:
        by_hair[r["itinerary"]].append((int(r["param_index"]),
                                        float(r["re"]), float(r["im"])))
    for name, pts in sorted(by_hair.items()):
        pts.sort()
        xs = [p[1] for p in pts]
        ys = [p[2] for p in pts]
        ax.plot(xs, ys, lw=0.8)
        ax.plot(xs[0], ys[0], marker=".", ms=4, color="black")
    ax.set_xlim(0.0, 12.0)
    ax.set_ylim(-16.0, 16.0)
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title("hair samples with endpoints")


def _render_pressure(ax, rows):
    by_route = defaultdict(list)
    for r in rows:
        by_route[(r["route"], r["N"])].append((int(r["m_or_n"]),
                                               float(r["value"])))
    values = []
    x_max = 1
    for (route, N), pts in sorted(by_route.items()):
        pts.sort()
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        values += ys
        x_max = max(x_max, max(xs))
        ax.plot(xs, ys, marker="o", ms=3, label=f"{route} (N={N})")
    lo, hi = min(values), max(values)
    pad = 0.1 * max(hi - lo, 1e-12)
    ax.set_xlim(0.0, x_max + 1.0)
    ax.set_ylim(lo - pad, hi + pad)
    ax.set_xlabel("truncation depth m / iterate n")
    ax.set_ylabel("pressure estimate")
    ax.legend()
    ax.set_title("pressure: eigen vs iterate route")


def _render_gibbs(ax, rows):
    ratios = np.array([float(r["ratio"]) for r in rows])
    logs = np.log10(ratios)
    lo, hi = logs.min(), logs.max()
    pad = 0.1 * max(hi - lo, 1e-12)
    ax.hist(logs, bins=30, range=(lo - pad, hi + pad), color="steelblue")
    ax.set_xlim(lo - pad, hi + pad)
    ax.set_xlabel("log10 Gibbs ratio")
    ax.set_ylabel("count")
    ax.set_title("Gibbs cylinder-mass ratios")


def _render_tightness(ax, rows):
    by_N = defaultdict(list)
    r_max = 1.0
    for r in rows:
        by_N[r["N"]].append((float(r["R"]), float(r["measured"]),
                             float(r["bound"])))
        r_max = max(r_max, float(r["R"]))
    floor = 1e-16  # log axis: zeros clamp to the documented floor
    for N, pts in sorted(by_N.items()):
        pts.sort()
        Rs = [p[0] for p in pts]
        ax.plot(Rs, [max(p[1], floor) for p in pts], marker="o", ms=3,
                label=f"measured (N={N})")
        ax.plot(Rs, [max(p[2], floor) for p in pts], marker="s", ms=3,
                ls="--", label=f"bound (N={N})")
    ax.set_yscale("log")
    ax.set_xlim(0.0, r_max + 5.0)
    ax.set_ylim(floor, 10.0)
    ax.set_xlabel("R")
    ax.set_ylabel("tail mass")
    ax.legend(fontsize=7)
    ax.set_title("tightness: tail mass vs bound")


_RENDERERS = {
    "hairs": _render_hairs,
    "pressure": _render_pressure,
    "gibbs": _render_gibbs,
    "tightness": _render_tightness,
}
