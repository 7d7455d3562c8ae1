"""Run manifests and result persistence."""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .. import __version__

CSV_SCHEMA = "percolab-results-v1"
RESULT_COLUMNS = ("experiment", "quantity", "value", "std_error",
                  "ci_lo", "ci_hi", "n", "extra")


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


@dataclass
class RunManifest:
    config_hash: str
    root_seed: int
    worker_count: int
    tool_version: str = __version__
    wall_clock: float = 0.0
    started_at: str = ""
    params: dict = field(default_factory=dict)
    goldens_version: int = 0
    csv_schema: str = CSV_SCHEMA

    def write(self, path: Path):
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


def write_results(path: Path, rows: list[dict]):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS)
        writer.writeheader()
        for row in rows:
            out = dict(row)
            out.setdefault("extra", "")
            if isinstance(out.get("extra"), dict):
                out["extra"] = json.dumps(out["extra"], sort_keys=True)
            writer.writerow(out)


def write_samples(path: Path, samples, column="sample"):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([column])
        for s in samples:
            writer.writerow([repr(float(s))])


def result_row(experiment, quantity, value, std_error="", ci=("", ""), n="",
               extra=""):
    return {
        "experiment": experiment,
        "quantity": quantity,
        "value": repr(float(value)) if value != "" else "",
        "std_error": repr(float(std_error)) if std_error != "" else "",
        "ci_lo": repr(float(ci[0])) if ci[0] != "" else "",
        "ci_hi": repr(float(ci[1])) if ci[1] != "" else "",
        "n": n,
        "extra": extra,
    }


class Stopwatch:
    def __enter__(self):
        self.t0 = time.time()
        self.started_at = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        return self

    def __exit__(self, *exc):
        self.elapsed = time.time() - self.t0
        return False
