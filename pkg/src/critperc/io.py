"""CSV tables and JSON run manifests."""
from __future__ import annotations

import csv
import io
import json
import math
import platform
from pathlib import Path

from . import __version__

CSV_COLUMNS = (
    "experiment",
    "label",
    "x",
    "y",
    "eps",
    "mesh",
    "n",
    "successes",
    "p_hat",
    "stderr",
    "ci_low",
    "ci_high",
    "truncated",
    "ratio",
    "ratio_stderr",
    "target",
    "conformal_radius",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def csv_text(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        unknown = set(row) - set(CSV_COLUMNS)
        if unknown:
            raise KeyError(f"unknown CSV columns {sorted(unknown)}")
        w.writerow([_fmt(row.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(rows, path) -> None:
    Path(path).write_text(csv_text(rows))


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def manifest(subcommand: str, argv: list[str], seed: int, config: dict, events: list[dict],
             wall_time: float, checks: list, outputs: dict) -> dict:
    return {
        "tool": "critperc",
        "version": __version__,
        "python": platform.python_version(),
        "subcommand": subcommand,
        "argv": argv,
        "seed": seed,
        "seed_hex": f"0x{seed:016x}",
        "config": config,
        "events": events,
        "wall_time_s": round(wall_time, 3),
        "checks": [
            {"name": c.name, "observed": c.observed, "target": c.target, "tolerance": c.tolerance,
             "z": c.z, "passed": c.passed}
            for c in checks
        ],
        "outputs": outputs,
    }


def write_manifest(data: dict, path) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n")


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text())
