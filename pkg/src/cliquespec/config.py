"""Run configuration and report persistence."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

ENV_PREFIX = "CLIQUESPEC_"
SUMMARY_FIELDS = ["n", "k", "class_size", "max_rho", "unique", "matches"]


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = 1e-12
    exhaustive_cap: int = 16
    enum_cap: int = 14
    output_dir: Path = Path("results")
    format: str = "json"
    seed: int = 0
    jobs: int = 1

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.exhaustive_cap < 3 or self.enum_cap < 3:
            raise ValueError("caps must be at least 3")
        if self.format not in ("json", "csv"):
            raise ValueError(f"format must be json or csv, got {self.format!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")


def env_default(name: str, fallback: Any) -> Any:
    """Default for flag ``name`` from ``CLIQUESPEC_<NAME>`` if set."""
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return fallback
    return type(fallback)(raw) if not isinstance(fallback, Path) else Path(raw)


def dumps(obj: Any, indent: int | None = None) -> str:
    return json.dumps(obj, sort_keys=True, indent=indent)


def save_report(report: Any, path: str | Path) -> Path:
    """Write a report (dataclass with ``to_dict`` or plain dict) as sorted JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = report.to_dict() if hasattr(report, "to_dict") else report
    path.write_text(dumps(data, indent=2) + "\n")
    return path


def load_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def summary_rows(reports: Iterable[Any]) -> list[dict]:
    rows = []
    for r in reports:
        rows.append({
            "n": r.n,
            "k": r.k,
            "class_size": r.class_size,
            "max_rho": f"{r.max_rho:.12f}",
            "unique": str(r.unique).lower(),
            "matches": str(r.matches_extremal).lower(),
        })
    return rows


def write_summary_csv(reports: Iterable[Any], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(summary_rows(reports))
    return path
