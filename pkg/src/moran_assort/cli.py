"""Batch command-line front-end.

``moran-assort <simulate|sde|density|critical-points|verify> --config PATH
--out DIR [--seed U64] [--grid K] [--replicas R] [--suite NAME]``

Subcommands parse one JSON experiment config (schema-validated, unknown
keys rejected), run the requested computation and write CSV/JSON artifacts
plus a manifest listing every output file with its checksum.  Exit codes:
0 success, 1 verification failure, 2 bad usage or config, 3 runtime error.
``MORAN_ASSORT_THREADS`` caps the replica worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from jsonschema import Draft202012Validator

from . import __version__, _kernels
from .assortment import AssortmentScheme
from .diffusion import DiffusionSpec, SdeConfig, sde_simulate
from .moran import ModelParams, PopulationState, Trajectory
from .recombination import make_recombination
from .runio import ManifestBuilder, atomic_write_text, density_csv, trajectory_csv, write_json
from .stationary import StationaryDensity, critical_points
from .verify import SUITES, run_suite


class ConfigError(ValueError):
    pass


_ASSORTMENT_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "kind": {"enum": ["hamming", "additive"]},
                "s": {"type": "array", "items": {"type": "number"}, "minItems": 2},
            },
            "required": ["kind", "s"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "custom_pairwise"},
                "entries": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "d01": {"type": "integer", "minimum": 0},
                            "d10": {"type": "integer", "minimum": 0},
                            "value": {"type": "number"},
                        },
                        "required": ["d01", "d10", "value"],
                        "additionalProperties": False,
                    },
                },
            },
            "required": ["kind", "entries"],
            "additionalProperties": False,
        },
    ]
}

_RECOMBINATION_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"kind": {"enum": ["none", "free"]}},
            "required": ["kind"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "single_crossover"},
                "r": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            },
            "required": ["kind", "r"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "custom"},
                "weights": {"type": "array", "items": {"type": "number"}},
            },
            "required": ["kind", "weights"],
            "additionalProperties": False,
        },
    ]
}

_CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1, "maximum": 12},
        "mu0": {"type": "number", "minimum": 0},
        "mu1": {"type": "number", "minimum": 0},
        "population_size": {"type": "integer", "minimum": 1},
        "assortment": _ASSORTMENT_SCHEMA,
        "recombination": _RECOMBINATION_SCHEMA,
        "init": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "monomorphic"},
                        "genotype": {"type": "integer", "minimum": 0},
                    },
                    "required": ["kind"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "counts"},
                        "counts": {
                            "type": "object",
                            "patternProperties": {r"^\d+$": {"type": "integer", "minimum": 0}},
                            "additionalProperties": False,
                        },
                    },
                    "required": ["kind", "counts"],
                    "additionalProperties": False,
                },
            ]
        },
        "run": {
            "type": "object",
            "properties": {
                "seed": {"type": "integer", "minimum": 0},
                "steps": {"type": "integer", "minimum": 0},
                "record_every": {"type": "integer", "minimum": 1},
                "replicas": {"type": "integer", "minimum": 0},
                "dt": {"type": "number"},
                "record_y": {
                    "oneOf": [
                        {"enum": ["all", "none"]},
                        {"type": "array", "items": {"type": "integer", "minimum": 3}},
                    ]
                },
            },
            "additionalProperties": False,
        },
        "density": {
            "type": "object",
            "properties": {
                "grid": {"type": "integer", "minimum": 1},
                "quadrature_order": {"type": "integer", "minimum": 4},
            },
            "additionalProperties": False,
        },
        "x0": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
    },
    "required": ["n", "mu0", "mu1", "assortment", "recombination"],
    "additionalProperties": False,
}


def load_config(path: str) -> dict:
    try:
        with open(path) as handle:
            cfg = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    errors = sorted(Draft202012Validator(_CONFIG_SCHEMA).iter_errors(cfg),
                    key=lambda e: list(e.path))
    if errors:
        locs = "; ".join(f"{'/'.join(str(p) for p in e.path) or '<root>'}: {e.message}"
                         for e in errors[:3])
        raise ConfigError(f"config rejected by schema: {locs}")
    for key in ("mu0", "mu1"):
        if not np.isfinite(cfg[key]):
            raise ConfigError(f"{key} must be finite")
    return cfg


def build_scheme(cfg: dict) -> AssortmentScheme:
    n = cfg["n"]
    spec = cfg["assortment"]
    if spec["kind"] in ("hamming", "additive"):
        if len(spec["s"]) != n + 1:
            raise ConfigError(f"assortment sequence needs n+1 = {n + 1} entries")
        maker = AssortmentScheme.hamming if spec["kind"] == "hamming" else AssortmentScheme.additive
        return maker(spec["s"])
    entries = {(e["d01"], e["d10"]): e["value"] for e in spec["entries"]}
    try:
        return AssortmentScheme.custom_pairwise(n, entries)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_recombination(cfg: dict):
    spec = cfg["recombination"]
    try:
        return make_recombination(cfg["n"], spec["kind"], rate=spec.get("r"),
                                  weights=spec.get("weights"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _run_section(cfg: dict, overrides) -> dict:
    run = dict(cfg.get("run", {}))
    if overrides.seed is not None:
        run["seed"] = overrides.seed
    if overrides.replicas is not None:
        run["replicas"] = overrides.replicas
    run.setdefault("seed", 0)
    run.setdefault("replicas", 1)
    run.setdefault("record_every", 1)
    return run


def _worker_count(replicas: int) -> int:
    cap = os.environ.get("MORAN_ASSORT_THREADS")
    if cap:
        try:
            return max(1, min(int(cap), max(replicas, 1)))
        except ValueError as exc:
            raise ConfigError(f"MORAN_ASSORT_THREADS must be an integer: {cap!r}") from exc
    return 1


def _y_masks(cfg_run: dict, n: int) -> list[int]:
    sel = cfg_run.get("record_y", "all" if n <= 4 else "none")
    if sel == "none":
        return []
    if sel == "all":
        return [L for L in range(1 << n) if bin(L).count("1") >= 2]
    masks = [int(m) for m in sel]
    for m in masks:
        if not 0 < m < (1 << n) or bin(m).count("1") < 2:
            raise ConfigError(f"recorded disequilibrium mask {m:#x} is not a valid pair-or-more subset")
    return masks


def cmd_simulate(cfg: dict, out_dir: str, args) -> int:
    if "population_size" not in cfg:
        raise ConfigError("simulate needs population_size")
    run = _run_section(cfg, args)
    if "steps" not in run:
        raise ConfigError("simulate needs run.steps")
    scheme = build_scheme(cfg)
    rec = build_recombination(cfg)
    try:
        params = ModelParams(scheme, rec, cfg["mu0"], cfg["mu1"], cfg["population_size"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    init_spec = cfg.get("init", {"kind": "monomorphic", "genotype": 0})
    if init_spec["kind"] == "monomorphic":
        genotype = init_spec.get("genotype", 0)
        if genotype >= (1 << cfg["n"]):
            raise ConfigError("init genotype out of range")
        init = PopulationState.monomorphic(cfg["n"], params.N, genotype)
    else:
        try:
            init = PopulationState.from_dict(
                cfg["n"], params.N, {int(k): v for k, v in init_spec["counts"].items()})
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"bad initial counts: {exc}") from exc
    replicas = run["replicas"]
    masks = _y_masks(run, cfg["n"])
    manifest = ManifestBuilder(cfg, {"master_seed": run["seed"], "replicas": replicas})
    if replicas:
        # streams are spawned per replica from the master seed, so results do
        # not depend on how the pool schedules them
        children = np.random.SeedSequence(run["seed"]).spawn(replicas)

        def run_one(rep: int) -> Trajectory:
            gen = np.random.Generator(np.random.PCG64(children[rep]))
            counts = init.counts.copy()
            nrec = run["steps"] // run["record_every"]
            snaps = np.empty((nrec, counts.size), dtype=np.int64)
            _kernels.moran_run(counts, params.pair_weights, params.rec_cdf,
                               params.mu0 / params.N, params.mu1 / params.N,
                               params.n, run["steps"], run["record_every"], gen, snaps)
            times = (np.arange(1, nrec + 1) * run["record_every"]).astype(np.int64)
            return Trajectory(times, snaps, tuple(children[rep].spawn_key))

        with ThreadPoolExecutor(max_workers=_worker_count(replicas)) as pool:
            trajectories = list(pool.map(run_one, range(replicas)))
        for rep, traj in enumerate(trajectories):
            xs = traj.x_path()
            ys = traj.y_path(masks) if masks else None
            path = os.path.join(out_dir, f"trajectory_r{rep:03d}.csv")
            atomic_write_text(path, trajectory_csv(traj.times, xs, ys, masks))
            manifest.add(path)
    manifest.write(os.path.join(out_dir, "manifest.json"))
    return 0


def cmd_sde(cfg: dict, out_dir: str, args) -> int:
    if "population_size" in cfg:
        raise ConfigError("sde configs must not carry population_size")
    run = _run_section(cfg, args)
    if "steps" not in run:
        raise ConfigError("sde needs run.steps")
    dt = run.get("dt", 1e-4)
    try:
        config = SdeConfig(dt=dt, steps=run["steps"], record_every=run["record_every"],
                           seed=run["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    spec = DiffusionSpec.from_scheme(build_scheme(cfg), cfg["mu0"], cfg["mu1"])
    x0 = np.asarray(cfg.get("x0", [0.5] * cfg["n"]), dtype=float)
    if x0.size != cfg["n"]:
        raise ConfigError(f"x0 needs {cfg['n']} coordinates")
    replicas = run["replicas"]
    manifest = ManifestBuilder(cfg, {"master_seed": run["seed"], "replicas": replicas})
    children = np.random.SeedSequence(run["seed"]).spawn(max(replicas, 1))

    def run_one(rep: int):
        gen = np.random.Generator(np.random.PCG64(children[rep]))
        return sde_simulate(spec, config, x0, rng=gen)

    if replicas:
        workers = _worker_count(replicas)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, range(replicas)))
        for rep, result in enumerate(results):
            path = os.path.join(out_dir, f"trajectory_r{rep:03d}.csv")
            atomic_write_text(path, trajectory_csv(result.times, result.path))
            manifest.add(path)
        manifest.seed_lineage["clamp_events"] = [
            {"at0": r.clamp0, "at1": r.clamp1} for r in results]
    manifest.seed_lineage["dt"] = dt
    manifest.seed_lineage["boundary_policy"] = config.boundary_policy
    manifest.write(os.path.join(out_dir, "manifest.json"))
    return 0


def cmd_density(cfg: dict, out_dir: str, args) -> int:
    n = cfg["n"]
    if n > 3:
        raise ConfigError(
            "dense density grids support n <= 3; estimate the normalising "
            "constant by Monte Carlo (StationaryDensity.normalise_monte_carlo) instead")
    if cfg["mu0"] <= 0 or cfg["mu1"] <= 0:
        raise ConfigError("the stationary density needs strictly positive mutation rates")
    density_cfg = cfg.get("density", {})
    grid = args.grid if args.grid is not None else density_cfg.get("grid", 101)
    if grid < 1:
        raise ConfigError("grid must be positive")
    order = density_cfg.get("quadrature_order", 64)
    sd = StationaryDensity(DiffusionSpec.from_scheme(build_scheme(cfg), cfg["mu0"], cfg["mu1"]))
    sd.normalise(order)
    axis = (np.arange(grid) + 0.5) / grid
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    h_vals = np.empty(pts.shape[0])
    logdens = np.empty(pts.shape[0])
    for row, p in enumerate(pts):
        h_vals[row] = sd.log_density(p, normalised=False)
        logdens[row] = h_vals[row] + sd.log_norm
    manifest = ManifestBuilder(cfg, {"grid": int(grid), "quadrature_order": int(order),
                                     "log_norm": sd.log_norm})
    path = os.path.join(out_dir, "density.csv")
    atomic_write_text(path, density_csv(pts, h_vals, logdens))
    manifest.add(path)
    manifest.write(os.path.join(out_dir, "manifest.json"))
    return 0


def cmd_critical_points(cfg: dict, out_dir: str, args) -> int:
    if cfg["mu0"] <= 0 or cfg["mu1"] <= 0:
        raise ConfigError("the stationary density needs strictly positive mutation rates")
    sd = StationaryDensity(DiffusionSpec.from_scheme(build_scheme(cfg), cfg["mu0"], cfg["mu1"]))
    report = critical_points(sd)
    manifest = ManifestBuilder(cfg, {})
    path = os.path.join(out_dir, "critical_points.json")
    write_json(path, report.to_dict())
    manifest.add(path)
    manifest.write(os.path.join(out_dir, "manifest.json"))
    return 0


def cmd_verify(args, out_dir: str | None) -> int:
    if args.suite is None:
        print("verify needs --suite NAME; available: " + ", ".join(sorted(SUITES)),
              file=sys.stderr)
        return 2
    if args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; available: " + ", ".join(sorted(SUITES)),
              file=sys.stderr)
        return 2
    result = run_suite(args.suite)
    for check in result.checks:
        status = "PASS" if check["passed"] else "FAIL"
        detail = f"  ({check['detail']})" if check["detail"] else ""
        print(f"[{status}] {result.suite}.{check['name']}{detail}")
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        write_json(os.path.join(out_dir, f"verify_{result.suite}.json"), result.to_dict())
    return 0 if result.passed else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="moran-assort",
        description="Multilocus Moran model with assortative mating: simulation and analysis")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "sde", "density", "critical-points"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--grid", type=int, default=None)
        p.add_argument("--replicas", type=int, default=None)
    pv = sub.add_parser("verify")
    pv.add_argument("--suite", default=None)
    pv.add_argument("--out", default=None)

    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args, args.out)
        cfg = load_config(args.config)
        os.makedirs(args.out, exist_ok=True)
        handler = {
            "simulate": cmd_simulate,
            "sde": cmd_sde,
            "density": cmd_density,
            "critical-points": cmd_critical_points,
        }[args.command]
        return handler(cfg, args.out, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
