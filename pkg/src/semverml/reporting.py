"""Evaluation orchestration and report rendering.

Three evaluation modes mirror the study protocol:

- within:    per-package stratified k-fold, all requested algorithms;
- dimension: within-package protocol with features restricted to one
             dimension at a time;
- cross:     leave-one-package-out over the whole corpus.

Reports are CSV files (one row per package, one column per
target/algorithm pair) plus a significance CSV comparing every algorithm
against the ZeroR baseline across packages. ``render_*`` functions produce
the text tables with Average, Median, and Relative ROC-AUC summary rows.
CSV content is deterministic for a fixed seed; timestamps only ever go to
the ``.meta.json`` sidecar.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .features import DIMENSIONS, Dataset
from .ml.metrics import cliffs_delta, mann_whitney, relative_auc
from .ml.validation import evaluate_cross, evaluate_dimension, evaluate_within

# CLI algorithm names; "xgb" is the gradient-boosted model
CLI_TO_ENGINE = {"xgb": "gbt", "rf": "rf", "dt": "dt", "lr": "lr",
                 "zeror": "zeror"}
ALGO_ORDER = ("xgb", "rf", "zeror", "dt", "lr")
TARGETS = ("major", "minor", "patch")
BASELINE = "zeror"


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and not np.isfinite(v)):
        return ""
    return format(float(v), ".9g")


@dataclass
class EvalReport:
    """Per-package mean ROC-AUC cells for (target, algorithm) pairs."""

    mode: str
    targets: tuple[str, ...]
    algorithms: tuple[str, ...]          # CLI names, baseline included
    cells: dict[tuple[str, str, str], float | None]  # (package, target, algo)
    packages: tuple[str, ...]
    seed: int
    folds: int
    excluded: dict[tuple[str, str, str], int] = field(default_factory=dict)

    def column_names(self) -> list[str]:
        return [f"{t}_{a}" for t in self.targets for a in self.algorithms]

    def to_csv(self) -> str:
        lines = [",".join(["package"] + self.column_names())]
        for pkg in self.packages:
            row = [pkg] + [_fmt(self.cells.get((pkg, t, a)))
                           for t in self.targets for a in self.algorithms]
            lines.append(",".join(row))
        return "".join(line + "\n" for line in lines)

    def column(self, target: str, algo: str) -> list[float]:
        out = []
        for pkg in self.packages:
            v = self.cells.get((pkg, target, algo))
            if v is not None and np.isfinite(v):
                out.append(v)
        return out

    def summary(self, target: str, algo: str) -> dict[str, float]:
        vals = self.column(target, algo)
        base = {
            pkg: self.cells.get((pkg, target, BASELINE))
            for pkg in self.packages
        }
        rel = []
        for pkg in self.packages:
            v = self.cells.get((pkg, target, algo))
            b = base[pkg]
            if v is not None and b:
                rel.append(relative_auc(v, b))
        return {
            "mean": float(np.mean(vals)) if vals else float("nan"),
            "median": float(np.median(vals)) if vals else float("nan"),
            "relative": float(np.mean(rel)) if rel else float("nan"),
        }

    def stats_csv(self) -> str:
        """Mann-Whitney p and Cliff's delta of each algorithm vs baseline."""
        lines = ["algorithm,target,p_value,delta,magnitude"]
        for target in self.targets:
            base_vals = self.column(target, BASELINE)
            for algo in self.algorithms:
                if algo == BASELINE:
                    continue
                vals = self.column(target, algo)
                if not vals or not base_vals:
                    lines.append(f"{algo},{target},,,")
                    continue
                _, p = mann_whitney(vals, base_vals)
                d, magnitude = cliffs_delta(vals, base_vals)
                lines.append(f"{algo},{target},{_fmt(p)},{_fmt(d)},{magnitude}")
        return "".join(line + "\n" for line in lines)


def run_within(datasets: dict[str, Dataset], algorithms, targets, k: int,
               seed: int) -> EvalReport:
    cells = {}
    excluded = {}
    for pkg in sorted(datasets):
        for target in targets:
            for algo in algorithms:
                res = evaluate_within(datasets[pkg], CLI_TO_ENGINE[algo],
                                      target, k=k, seed=seed)
                mean = res.mean_auc
                cells[(pkg, target, algo)] = \
                    None if not np.isfinite(mean) else mean
                excluded[(pkg, target, algo)] = res.n_excluded
    return EvalReport(mode="within", targets=tuple(targets),
                      algorithms=tuple(algorithms), cells=cells,
                      packages=tuple(sorted(datasets)), seed=seed, folds=k,
                      excluded=excluded)


def run_dimension(datasets: dict[str, Dataset], algorithm: str, targets,
                  k: int, seed: int, dimensions=None) -> list[dict]:
    """Long-format rows: one per (package, target, dimension); the default
    runs each of the six dimensions."""
    dims = tuple(dimensions or DIMENSIONS)
    rows = []
    for pkg in sorted(datasets):
        for target in targets:
            for dim in dims:
                res = evaluate_dimension(datasets[pkg], dim,
                                         CLI_TO_ENGINE[algorithm], target,
                                         k=k, seed=seed)
                rows.append({
                    "package": pkg,
                    "target": target,
                    "dimension": dim,
                    "algorithm": algorithm,
                    "mean_auc": res.mean_auc,
                    "n_excluded": res.n_excluded,
                })
    return rows


def dimension_csv(rows: list[dict]) -> str:
    lines = ["package,target,dimension,algorithm,mean_auc,n_excluded"]
    for r in rows:
        lines.append(f"{r['package']},{r['target']},{r['dimension']},"
                     f"{r['algorithm']},{_fmt(r['mean_auc'])},"
                     f"{r['n_excluded']}")
    return "".join(line + "\n" for line in lines)


def run_cross(datasets: dict[str, Dataset], algorithms, targets,
              seed: int) -> EvalReport:
    cells = {}
    for target in targets:
        for algo in algorithms:
            res = evaluate_cross(datasets, CLI_TO_ENGINE[algo], target,
                                 seed=seed)
            for pkg, auc in res.per_package.items():
                cells[(pkg, target, algo)] = auc
    return EvalReport(mode="cross", targets=tuple(targets),
                      algorithms=tuple(algorithms), cells=cells,
                      packages=tuple(sorted(datasets)), seed=seed, folds=0)


def render_table(report: EvalReport) -> str:
    """Fixed-width text table with Average/Median/Relative summary rows."""
    headers = ["Package"] + [f"{t[:3]}.{a}" for t in report.targets
                             for a in report.algorithms]
    widths = [max(18, len(headers[0]))] + [max(9, len(h) + 1)
                                           for h in headers[1:]]

    def fmt_row(cells):
        return "  ".join(str(c)[:w].rjust(w) if i else str(c)[:w].ljust(w)
                         for i, (c, w) in enumerate(zip(cells, widths)))

    def num(v):
        return "--" if v is None or not np.isfinite(v) else f"{v:.2f}"

    lines = [fmt_row(headers), fmt_row(["-" * w for w in widths])]
    for pkg in report.packages:
        lines.append(fmt_row(
            [pkg] + [num(report.cells.get((pkg, t, a)))
                     for t in report.targets for a in report.algorithms]))
    lines.append(fmt_row(["-" * w for w in widths]))
    summaries = {
        (t, a): report.summary(t, a)
        for t in report.targets for a in report.algorithms
    }
    lines.append(fmt_row(["Average"] + [num(summaries[(t, a)]["mean"])
                                        for t in report.targets
                                        for a in report.algorithms]))
    lines.append(fmt_row(["Median"] + [num(summaries[(t, a)]["median"])
                                       for t in report.targets
                                       for a in report.algorithms]))
    rel_cells = []
    for t in report.targets:
        for a in report.algorithms:
            if a == BASELINE:
                rel_cells.append("--")
            else:
                r = summaries[(t, a)]["relative"]
                rel_cells.append("--" if not np.isfinite(r) else f"{r:.2f}X")
    lines.append(fmt_row(["Relative ROC-AUC"] + rel_cells))
    return "".join(line + "\n" for line in lines)


def render_dimension_table(rows: list[dict]) -> str:
    header = f"{'Package':<18}  {'Target':<7} {'Dimension':<12} " \
             f"{'ROC-AUC':>8}  {'excl':>4}"
    lines = [header, "-" * len(header)]
    for r in rows:
        auc = r["mean_auc"]
        val = "--" if auc is None or not np.isfinite(auc) else f"{auc:.2f}"
        lines.append(f"{r['package']:<18}  {r['target']:<7} "
                     f"{r['dimension']:<12} {val:>8}  {r['n_excluded']:>4}")
    return "".join(line + "\n" for line in lines)


def write_report_files(out_dir, mode: str, seed: int, folds: int,
                       report: EvalReport | None = None,
                       dim_rows: list[dict] | None = None) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if report is not None:
        eval_path = out / f"{mode}_eval.csv"
        eval_path.write_text(report.to_csv(), encoding="utf-8")
        written.append(eval_path)
        stats_path = out / f"{mode}_stats.csv"
        stats_path.write_text(report.stats_csv(), encoding="utf-8")
        written.append(stats_path)
    if dim_rows is not None:
        dim_path = out / "dimension_eval.csv"
        dim_path.write_text(dimension_csv(dim_rows), encoding="utf-8")
        written.append(dim_path)
    meta = {
        "tool_version": __version__,
        "mode": mode,
        "seed": seed,
        "folds": folds,
        "created_ts": datetime.now(timezone.utc).isoformat(),
    }
    (out / f"{mode}_eval.meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return written
