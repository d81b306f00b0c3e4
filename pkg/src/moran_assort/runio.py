"""File outputs: trajectory/density CSVs, JSON reports and run manifests.

Every file is written to a temporary name in the target directory and
renamed into place, so a crashed run never leaves a partial file behind.
Floats are rendered with ``repr`` (shortest round-trip form), which makes
outputs byte-identical across runs with the same seed.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._kernels import BACKEND


def _fmt(value) -> str:
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    return str(value)


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_of(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def trajectory_csv(times, xs, ys=None, y_masks=()) -> str:
    """Rows of t, x1..xn and the selected disequilibrium columns."""
    n = xs.shape[1]
    header = ["t"] + [f"x{i + 1}" for i in range(n)]
    header += [f"y_{mask:x}" for mask in y_masks]
    lines = [",".join(header)]
    for row in range(xs.shape[0]):
        cells = [_fmt(times[row])] + [_fmt(v) for v in xs[row]]
        if ys is not None:
            cells += [_fmt(v) for v in ys[row]]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def density_csv(points, h_vals, logdens_vals) -> str:
    n = points.shape[1]
    header = [f"x{i + 1}" for i in range(n)] + ["h", "logdensity"]
    lines = [",".join(header)]
    for row in range(points.shape[0]):
        cells = [_fmt(v) for v in points[row]] + [_fmt(h_vals[row]), _fmt(logdens_vals[row])]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_json(path: str, payload: dict) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


@dataclass
class ManifestBuilder:
    """Collects the outputs of one command into its manifest."""

    config: dict
    seed_lineage: dict
    started: float = field(default_factory=time.monotonic)
    files: dict = field(default_factory=dict)

    def add(self, path: str) -> None:
        self.files[os.path.basename(path)] = {
            "sha256": sha256_of(path),
            "bytes": os.path.getsize(path),
        }

    def write(self, path: str) -> dict:
        payload = {
            "tool_version": __version__,
            "rng": {"bit_generator": "PCG64", "backend": BACKEND},
            "config": self.config,
            "seed_lineage": self.seed_lineage,
            "files": self.files,
            "wall_clock_s": round(time.monotonic() - self.started, 6),
        }
        write_json(path, payload)
        return payload
