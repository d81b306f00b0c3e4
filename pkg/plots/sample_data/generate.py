#!/usr/bin/env python3
"""Regenerate the checked-in sample outputs consumed by the figure scripts.

Runs the moran-assort CLI on the repository configs at reduced step counts
so the files stay small.  Invoke from the repository root:

    python plots/sample_data/generate.py
"""

import json
import os
import shutil
import sys
import tempfile

from moran_assort.cli import main

HERE = os.path.dirname(os.path.abspath(__file__))
CONFIGS = os.path.join(HERE, "..", "..", "configs")


def run(args):
    rc = main(args)
    if rc != 0:
        raise SystemExit(f"command failed ({rc}): {args}")


def density(config, out, grid):
    run(["density", "--config", config, "--out", out, "--grid", str(grid)])


def reduced_simulate(config, out, steps, record_every):
    with open(config) as handle:
        cfg = json.load(handle)
    cfg["run"]["steps"] = steps
    cfg["run"]["record_every"] = record_every
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as tmp:
        json.dump(cfg, tmp)
        path = tmp.name
    try:
        run(["simulate", "--config", path, "--out", out])
    finally:
        os.unlink(path)


def sde_config_like(config):
    with open(config) as handle:
        cfg = json.load(handle)
    cfg.pop("population_size", None)
    cfg.pop("init", None)
    cfg.pop("run", None)
    return cfg


def main_():
    for name in ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6"):
        shutil.rmtree(os.path.join(HERE, name), ignore_errors=True)

    density(os.path.join(CONFIGS, "fig1_left.json"),
            os.path.join(HERE, "fig1", "left"), 201)
    density(os.path.join(CONFIGS, "fig1_right.json"),
            os.path.join(HERE, "fig1", "right"), 201)

    for fig in ("fig2", "fig3", "fig4"):
        out = os.path.join(HERE, fig)
        cfg = os.path.join(CONFIGS, f"{fig}.json")
        density(cfg, out, 61)
        run(["critical-points", "--config", cfg, "--out", out])

    # trajectories at reduced scale, with the matching landscape as backdrop
    fig5 = os.path.join(HERE, "fig5")
    reduced_simulate(os.path.join(CONFIGS, "fig5.json"), fig5,
                     steps=8_000_000, record_every=1000)
    sde_like = sde_config_like(os.path.join(CONFIGS, "fig5.json"))
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as tmp:
        json.dump(sde_like, tmp)
        path = tmp.name
    try:
        density(path, os.path.join(fig5, "landscape"), 61)
        run(["critical-points", "--config", path, "--out", fig5])
    finally:
        os.unlink(path)

    fig6 = os.path.join(HERE, "fig6")
    reduced_simulate(os.path.join(CONFIGS, "fig6a.json"), fig6,
                     steps=8_000_000, record_every=2000)
    with open(os.path.join(CONFIGS, "fig6a.json")) as handle:
        cfg6 = json.load(handle)
    for key in ("population_size", "init", "run"):
        cfg6.pop(key, None)
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as tmp:
        json.dump(cfg6, tmp)
        path = tmp.name
    try:
        run(["critical-points", "--config", path, "--out", fig6])
    finally:
        os.unlink(path)
    print("sample data regenerated under", HERE)


if __name__ == "__main__":
    sys.exit(main_())
