"""The three figure renderers: density curves, landscapes, trajectories."""

from __future__ import annotations

import os

import matplotlib.pyplot as plt
import numpy as np

import figlib


def render_density_curves(in_dir: str, out_path: str) -> None:
    """Overlay one-locus density curves, one per density CSV found."""
    files = figlib.find_density_files(in_dir)
    if not files:
        raise figlib.InputError(f"no density CSV under {in_dir}")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for path in files:
        cols = figlib.read_csv_columns(path)
        if "x1" not in cols or "logdensity" not in cols or "x2" in cols:
            raise figlib.InputError(f"{path}: expected a one-locus density grid")
        label = os.path.relpath(path, in_dir)
        order = np.argsort(cols["x1"])
        ax.plot(cols["x1"][order], np.exp(cols["logdensity"][order]), label=label)
    ax.set_xlabel("allele-0 frequency")
    ax.set_ylabel("stationary density")
    ax.legend(fontsize=8)
    figlib.save(fig, out_path)


def render_landscape(in_dir: str, out_path: str) -> list[str]:
    """Two-locus density heatmap with the report's critical points marked.

    Returns the legend labels (marker kind + count) for verification.
    """
    files = figlib.find_density_files(in_dir)
    if not files:
        raise figlib.InputError(f"no density CSV under {in_dir}")
    cols = figlib.read_csv_columns(files[0])
    if "x2" not in cols or "x3" in cols:
        raise figlib.InputError("landscapes need a two-locus density grid")
    x1 = np.unique(cols["x1"])
    x2 = np.unique(cols["x2"])
    if x1.size * x2.size != cols["x1"].size:
        raise figlib.InputError("density grid is not rectangular")
    dens = np.exp(cols["logdensity"]).reshape(x1.size, x2.size)
    fig, ax = plt.subplots(figsize=(5.6, 5.0))
    mesh = ax.pcolormesh(x1, x2, dens.T, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="stationary density")
    labels = figlib.draw_markers(ax, figlib.load_report(in_dir))
    if labels:
        ax.legend(loc="upper center", fontsize=8, framealpha=0.9)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    figlib.save(fig, out_path)
    return labels


def render_trajectory(in_dir: str, out_path: str) -> list[str]:
    """Time-segmented trajectory plot (2-D over a backdrop, or 3-D scatter).

    Returns the legend labels of any critical-point markers drawn.
    """
    files = figlib.find_trajectory_files(in_dir)
    if not files:
        raise figlib.InputError(f"no trajectory CSV under {in_dir}")
    cols = figlib.read_csv_columns(files[0])
    dims = [name for name in cols if name.startswith("x")]
    manifest = figlib.load_manifest(in_dir)
    seg = figlib.segment_length_rows(manifest)
    report = figlib.load_report(in_dir)
    cmap = plt.get_cmap("turbo")

    if len(dims) == 2:
        fig, ax = plt.subplots(figsize=(5.6, 5.0))
        density_files = figlib.find_density_files(in_dir)
        if density_files:
            dcols = figlib.read_csv_columns(density_files[0])
            x1 = np.unique(dcols["x1"])
            x2 = np.unique(dcols["x2"])
            dens = np.exp(dcols["logdensity"]).reshape(x1.size, x2.size)
            ax.pcolormesh(x1, x2, dens.T, shading="nearest", cmap="Greys")
        xs, ys = cols["x1"], cols["x2"]
        nseg = max(1, int(np.ceil(xs.size / seg)))
        for k in range(nseg):
            sl = slice(k * seg, min((k + 1) * seg + 1, xs.size))
            ax.plot(xs[sl], ys[sl], lw=0.6, color=cmap(k / max(nseg - 1, 1)))
        labels = figlib.draw_markers(ax, report)
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
    elif len(dims) == 3:
        fig = plt.figure(figsize=(6.0, 5.4))
        ax = fig.add_subplot(projection="3d")
        pts = np.stack([cols["x1"], cols["x2"], cols["x3"]], axis=1)
        nseg = max(1, int(np.ceil(pts.shape[0] / seg)))
        colors = cmap(np.minimum(np.arange(pts.shape[0]) // seg, nseg - 1)
                      / max(nseg - 1, 1))
        ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], s=2, c=colors, depthshade=False)
        labels = figlib.draw_markers(ax, report, three_d=True)
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
        ax.set_zlabel("x3")
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.set_zlim(0, 1)
    else:
        raise figlib.InputError(f"trajectory dimension {len(dims)} not drawable")
    if labels:
        ax.legend(loc="upper left", fontsize=8, framealpha=0.9)
    figlib.save(fig, out_path)
    return labels


def run_cli(render, description: str) -> int:
    import argparse
    import sys

    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the CLI outputs to render")
    parser.add_argument("--out", dest="out_path", required=True,
                        help="image file to write")
    args = parser.parse_args()
    try:
        render(args.in_dir, args.out_path)
    except figlib.InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0
