"""Shared loading and rendering helpers for the figure scripts.

The scripts are pure file-to-file transforms over the documented CSV/JSON
schemas: density grids (``x1..xn,h,logdensity``), trajectories
(``t,x1..xn,y_<maskhex>...``), critical-point reports and run manifests.
They never recompute model quantities; everything drawn comes straight
from the files.

Marker convention: a black dot marks each maximum, an open dot each
minimum, a cross each saddle (index-2 saddles for three loci) and a
diamond each index-1 saddle.  The legend always carries the per-kind
counts so a rendered figure can be checked against its report.
"""

from __future__ import annotations

import csv
import json
import os

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams.update({"figure.dpi": 110, "svg.hashsalt": "fixed"})


class InputError(ValueError):
    pass


def read_csv_columns(path: str) -> dict[str, np.ndarray]:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        rows = [[float(cell) for cell in row] for row in reader if row]
    data = np.asarray(rows)
    if data.size == 0:
        data = data.reshape(0, len(header))
    if data.shape[1] != len(header):
        raise InputError(f"{path}: ragged rows")
    return {name: data[:, k] for k, name in enumerate(header)}


def find_density_files(in_dir: str) -> list[str]:
    out = []
    for root, _, files in os.walk(in_dir):
        for name in sorted(files):
            if name.endswith(".csv"):
                with open(os.path.join(root, name)) as handle:
                    header = handle.readline().strip().split(",")
                if header[-2:] == ["h", "logdensity"]:
                    out.append(os.path.join(root, name))
    return out


def find_trajectory_files(in_dir: str) -> list[str]:
    out = []
    for root, _, files in os.walk(in_dir):
        for name in sorted(files):
            if name.startswith("trajectory_") and name.endswith(".csv"):
                out.append(os.path.join(root, name))
    return out


def load_report(in_dir: str) -> dict | None:
    for root, _, files in os.walk(in_dir):
        if "critical_points.json" in files:
            with open(os.path.join(root, "critical_points.json")) as handle:
                return json.load(handle)
    return None


def load_manifest(in_dir: str) -> dict | None:
    for root, _, files in os.walk(in_dir):
        if "manifest.json" in files:
            with open(os.path.join(root, "manifest.json")) as handle:
                return json.load(handle)
    return None


MARKERS = {
    "maximum": dict(marker="o", color="black", s=45, zorder=5, label="maximum"),
    "minimum": dict(marker="o", facecolors="white", edgecolors="black", s=45,
                    zorder=5, label="minimum"),
    "saddle": dict(marker="x", color="black", s=50, zorder=5, label="saddle"),
    "saddle_index_1": dict(marker="D", facecolors="white", edgecolors="black",
                           s=40, zorder=5, label="index-1 saddle"),
}


def classify_points(report: dict) -> dict[str, list[list[float]]]:
    """Group report points by marker kind (three-locus saddles split by index)."""
    groups: dict[str, list[list[float]]] = {}
    n = report["n"]
    for point in report["points"]:
        kind = point["kind"]
        if kind == "saddle" and n >= 3 and point["observed_index"] == 1:
            kind = "saddle_index_1"
        groups.setdefault(kind, []).append(point["coords"])
    return groups


def legend_label(kind: str, count: int) -> str:
    return f"{MARKERS[kind]['label']} ({count})"


def draw_markers(ax, report: dict | None, three_d: bool = False) -> list[str]:
    """Scatter the report's critical points; returns the legend labels used."""
    if report is None or not report.get("points"):
        return []
    labels = []
    for kind in ("maximum", "saddle", "saddle_index_1", "minimum"):
        pts = classify_points(report).get(kind)
        if not pts:
            continue
        arr = np.asarray(pts)
        style = dict(MARKERS[kind])
        label = legend_label(kind, len(pts))
        style["label"] = label
        labels.append(label)
        if three_d:
            ax.scatter(arr[:, 0], arr[:, 1], arr[:, 2], **style)
        else:
            ax.scatter(arr[:, 0], arr[:, 1], **style)
    return labels


def segment_length_rows(manifest: dict | None, default: int = 500) -> int:
    """Trajectory colour-segment length in rows: half of N^2 events, converted
    through the recorded cadence (read from the manifest, never hardcoded)."""
    if manifest is None:
        return default
    try:
        config = manifest["config"]
        N = config["population_size"]
        cadence = config["run"].get("record_every", 1)
        return max(1, int(N * N / 2 / cadence))
    except KeyError:
        return default


def save(fig, out_path: str) -> None:
    directory = os.path.dirname(os.path.abspath(out_path))
    os.makedirs(directory, exist_ok=True)
    fig.savefig(out_path, metadata={"Software": "moran-assort-plots"})
    plt.close(fig)
