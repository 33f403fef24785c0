"""Trial scheduling, record serialisation and report emission.

Trials are grouped into fixed blocks of ``block_size`` consecutive indices per
parameter group; blocks are the work units handed to the process pool.  Since
each trial draws from its own generator and blocks never depend on the worker
count, the ordered records are identical for any number of workers.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .config import ExperimentConfig

__all__ = ["TrialRecord", "Report", "group_seed", "run_blocks", "InvariantViolation"]


class InvariantViolation(RuntimeError):
    """A theorem-backed certificate failed: an implementation bug, not noise."""


@dataclass
class TrialRecord:
    """One trial's outcome.  ``fields`` hold the experiment-specific values;
    ``wall_time`` is kept out of the CSV so reruns stay byte-identical."""

    trial_index: int
    d: int
    fields: dict
    wall_time: float = 0.0

    def row(self) -> dict:
        return {"trial_index": self.trial_index, "d": self.d, **self.fields}


def group_seed(master_seed: int, *key: int) -> int:
    """Seed for one parameter group, derived from the master seed and the key."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


BlockFn = Callable[[ExperimentConfig, tuple, Sequence[int]], list]


def _run_block(args):
    fn, cfg, key, indices = args
    out = []
    for i in indices:
        t0 = time.perf_counter()
        d, fields_ = fn(cfg, key, i)
        out.append(TrialRecord(int(i), int(d), fields_, time.perf_counter() - t0))
    return out


def _run_batch(args):
    fn, cfg, key, indices = args
    t0 = time.perf_counter()
    res = fn(cfg, key, indices)
    dt = (time.perf_counter() - t0) / max(1, len(indices))
    return [TrialRecord(int(i), int(d), f, dt) for i, (d, f) in zip(indices, res)]


def run_blocks(fn, cfg: ExperimentConfig, groups: Sequence[tuple], batched: bool = False) -> list[TrialRecord]:
    """Run ``cfg.trials`` trials for every group key.

    ``fn(cfg, key, i)`` returns ``(d, fields)`` for one trial; with ``batched``
    it takes the whole index block and returns a list of those pairs.
    """
    units = []
    for key in groups:
        for s in range(0, cfg.trials, cfg.block_size):
            units.append((fn, cfg, key, tuple(range(s, min(cfg.trials, s + cfg.block_size)))))
    runner = _run_batch if batched else _run_block
    if cfg.workers == 1 or len(units) == 1:
        blocks = [runner(u) for u in units]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            blocks = list(ex.map(runner, units))
    return [r for b in blocks for r in b]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


@dataclass
class Report:
    config: ExperimentConfig
    records: list[TrialRecord]
    summary: dict
    violations: int = 0
    notes: list[str] = field(default_factory=list)

    def columns(self) -> list[str]:
        cols: list[str] = []
        for r in self.records:
            for k in r.row():
                if k not in cols:
                    cols.append(k)
        return cols

    def trials_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = self.columns()
        w.writerow(cols)
        for r in self.records:
            row = r.row()
            w.writerow([_fmt(row.get(c)) for c in cols])
        return buf.getvalue()

    def trials_json(self) -> str:
        return json.dumps([_jsonable(r.row()) for r in self.records], indent=1) + "\n"

    def summary_json(self) -> str:
        wall = [r.wall_time for r in self.records]
        doc = {
            "experiment": self.config.experiment,
            "config": _jsonable(self.config.as_dict()),
            "violations": self.violations,
            "summary": _jsonable(self.summary),
            "notes": self.notes,
            "wall_time_total_s": float(sum(wall)),
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    def report_md(self) -> str:
        lines = [f"# {self.config.experiment}", "", "## Configuration", ""]
        for k, v in self.config.as_dict().items():
            lines.append(f"- `{k}`: {v}")
        lines += ["", "## Results", ""]
        lines += _md_summary(self.summary)
        if self.notes:
            lines += ["", "## Notes", ""] + [f"- {n}" for n in self.notes]
        lines += ["", f"Invariant violations: {self.violations}", ""]
        return "\n".join(lines)

    def write(self, out: str | Path) -> list[Path]:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        if self.config.format == "csv":
            p = out / "trials.csv"
            p.write_text(self.trials_csv())
        else:
            p = out / "trials.json"
            p.write_text(self.trials_json())
        paths.append(p)
        for name, text in (("summary.json", self.summary_json()), ("report.md", self.report_md())):
            q = out / name
            q.write_text(text)
            paths.append(q)
        return paths


def _md_summary(summary: dict, depth: int = 0) -> list[str]:
    lines = []
    pad = "  " * depth
    for k, v in summary.items():
        if isinstance(v, dict):
            lines.append(f"{pad}- **{k}**")
            lines += _md_summary(v, depth + 1)
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}- **{k}**")
            for item in v:
                lines.append(f"{pad}  - " + ", ".join(f"{a}={_short(b)}" for a, b in item.items()))
        else:
            lines.append(f"{pad}- {k}: {_short(v)}")
    return lines


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)
