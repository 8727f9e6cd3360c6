"""Run records and the Table-style CSV/JSON summaries."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from .cost import CostBreakdown

CSV_COLUMNS = ["instance", "method", "n_runs", "mean_cost", "std_cost", "mean_seconds", "unit"]
METHODS = ("rl_init", "random_init")


@dataclass
class RunRecord:
    instance: str
    method: str
    seed: int
    sa_steps: int
    final: CostBreakdown
    trace: List[Tuple[int, float, float]] = field(default_factory=list)
    seconds: float = 0.0
    # reported cost = final.total * unit_scale, expressed in `unit`
    unit: str = "cost"
    unit_scale: float = 1.0
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        self.trace = [(int(s), float(c), float(b)) for s, c, b in self.trace]

    @property
    def reported_cost(self) -> float:
        return self.final.total * self.unit_scale

    def check_trace(self) -> bool:
        best = [b for _, _, b in self.trace]
        return all(b1 <= b0 for b0, b1 in zip(best, best[1:]))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["final"] = self.final.to_dict()
        d["trace"] = [list(t) for t in self.trace]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        d = dict(d)
        d["final"] = CostBreakdown.from_dict(d["final"])
        d["trace"] = [tuple(t) for t in d["trace"]]
        return cls(**d)


def _paths(path: Union[str, Path]) -> Tuple[Path, Path]:
    p = Path(path)
    if p.suffix in (".csv", ".json"):
        p = p.with_suffix("")
    return p.with_suffix(".csv"), p.with_suffix(".json")


def summarize(records: Sequence[RunRecord]) -> List[dict]:
    """One row per (instance, method). std is the sample std; 0.0 for one run."""
    groups: Dict[Tuple[str, str], List[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.instance, r.method), []).append(r)
    rows = []
    for (inst, method), rs in groups.items():
        costs = np.array([r.reported_cost for r in rs])
        rows.append({
            "instance": inst,
            "method": method,
            "n_runs": len(rs),
            "mean_cost": float(costs.mean()),
            "std_cost": float(costs.std(ddof=1)) if len(rs) > 1 else 0.0,
            "mean_seconds": float(np.mean([r.seconds for r in rs])),
            "unit": rs[0].unit,
        })
    return rows


def write_results(records: Sequence[RunRecord], path: Union[str, Path]) -> Tuple[Path, Path]:
    """Write ``<path>.csv`` (summary) and ``<path>.json`` (full records)."""
    csv_path, json_path = _paths(path)
    try:
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        with open(csv_path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            w.writeheader()
            w.writerows(summarize(records))
        json_path.write_text(json.dumps([r.to_dict() for r in records], indent=1))
    except OSError as e:
        raise OSError(f"cannot write results to {csv_path.parent}: {e}") from e
    return csv_path, json_path


def read_results(path: Union[str, Path]) -> List[RunRecord]:
    _, json_path = _paths(path)
    try:
        data = json.loads(json_path.read_text())
    except OSError as e:
        raise OSError(f"cannot read results from {json_path}: {e}") from e
    return [RunRecord.from_dict(d) for d in data]


def read_summary(path: Union[str, Path]) -> List[dict]:
    csv_path, _ = _paths(path)
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        r["n_runs"] = int(r["n_runs"])
        for k in ("mean_cost", "std_cost", "mean_seconds"):
            r[k] = float(r[k]) if r[k] else math.nan
    return rows
