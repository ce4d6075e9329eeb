"""Assemble the 41-feature vector per labeled release and persist datasets.

Feature names are grouped into six dimensions; the canonical column order
below is the one used everywhere (CSV headers, model manifests, matrices):

- change_type (20): AJF MJF DJF ANJF DNJF MNJF ADM DEM MOM MNC MPC MPD
                    MLA MLM MLD GVA GVD ICC DCC MCC
- dependency   (4): TCPJ PA PD PU
- complexity   (5): ACYCD CLCJD CYCD LA LD
- time         (1): RDTD
- development  (6): TCM TAU POI PCI PCPR POPR
- textual      (5): NBF KWM KWP KWB AML

Datasets are CSV files with header ``release_id,package,label,<41 names>``;
values are printed with 9 significant digits, which round-trips losslessly
for everything the pipeline produces. A provenance sidecar
(``<dataset>.meta.json``) carries the tool version, an ingest hash, and the
creation timestamp, keeping the CSV itself byte-reproducible.
"""

from __future__ import annotations

import difflib
import hashlib
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import IncompleteInputs, SchemaMismatch
from .jsparse import file_metrics, parse_js
from .mining import (
    DependencyFeatures,
    DevelopmentFeatures,
    ReleaseInterval,
    ReleaseStore,
    TextualFeatures,
    build_release_timeline,
    dependency_features,
    development_features,
    read_manifest,
    textual_features,
    time_feature,
)
from .semver import ReleaseType
from .treediff import ChangeTypeCounts, Snapshot, release_change_counts

CHANGE_TYPE_FEATURES = (
    "AJF", "MJF", "DJF", "ANJF", "DNJF", "MNJF", "ADM", "DEM", "MOM", "MNC",
    "MPC", "MPD", "MLA", "MLM", "MLD", "GVA", "GVD", "ICC", "DCC", "MCC")
DEPENDENCY_FEATURES = ("TCPJ", "PA", "PD", "PU")
COMPLEXITY_FEATURES = ("ACYCD", "CLCJD", "CYCD", "LA", "LD")
TIME_FEATURES = ("RDTD",)
DEVELOPMENT_FEATURES = ("TCM", "TAU", "POI", "PCI", "PCPR", "POPR")
TEXTUAL_FEATURES = ("NBF", "KWM", "KWP", "KWB", "AML")

DIMENSIONS: dict[str, tuple[str, ...]] = {
    "change_type": CHANGE_TYPE_FEATURES,
    "dependency": DEPENDENCY_FEATURES,
    "complexity": COMPLEXITY_FEATURES,
    "time": TIME_FEATURES,
    "development": DEVELOPMENT_FEATURES,
    "textual": TEXTUAL_FEATURES,
}

FEATURE_NAMES: tuple[str, ...] = (
    CHANGE_TYPE_FEATURES + DEPENDENCY_FEATURES + COMPLEXITY_FEATURES
    + TIME_FEATURES + DEVELOPMENT_FEATURES + TEXTUAL_FEATURES)

assert len(FEATURE_NAMES) == 41

_META_COLUMNS = ("release_id", "package", "label")


def dimension_of(feature: str) -> str:
    for dim, names in DIMENSIONS.items():
        if feature in names:
            return dim
    raise KeyError(feature)


# ---------------------------------------------------------------------------
# snapshot analysis and complexity features

@dataclass
class SnapshotAnalysis:
    """Aggregated JS metrics plus the line material needed for churn."""

    loc: int
    function_count: int
    cyclomatic_total: int
    js_lines: dict[str, tuple[str, ...]]  # relpath -> non-blank source lines

    @property
    def cyclomatic_avg(self) -> float:
        return self.cyclomatic_total / max(1, self.function_count)


def analyze_snapshot(snapshot: Snapshot) -> SnapshotAnalysis:
    loc = functions = cyc_total = 0
    js_lines: dict[str, tuple[str, ...]] = {}
    for rel in snapshot.paths():
        if not rel.endswith(".js"):
            continue
        source = snapshot.read_text(rel)
        ast = parse_js(source, rel)
        m = file_metrics(ast)
        loc += m.loc
        functions += m.function_count
        cyc_total += m.cyclomatic_total
        js_lines[rel] = tuple(
            line for line in source.splitlines() if line.strip())
    return SnapshotAnalysis(loc=loc, function_count=functions,
                            cyclomatic_total=cyc_total, js_lines=js_lines)


@dataclass
class ComplexityFeatures:
    ACYCD: float
    CLCJD: int
    CYCD: int
    LA: int
    LD: int


def line_churn(before: SnapshotAnalysis, after: SnapshotAnalysis) -> tuple[int, int]:
    """Lines added/deleted summed over per-file diffs of non-blank lines."""
    added = deleted = 0
    for rel in sorted(before.js_lines.keys() | after.js_lines.keys()):
        b = before.js_lines.get(rel, ())
        a = after.js_lines.get(rel, ())
        if b == a:
            continue
        sm = difflib.SequenceMatcher(a=b, b=a, autojunk=False)
        for op, i1, i2, j1, j2 in sm.get_opcodes():
            if op in ("replace", "delete"):
                deleted += i2 - i1
            if op in ("replace", "insert"):
                added += j2 - j1
    return added, deleted


def complexity_features(metrics_before: SnapshotAnalysis,
                        metrics_after: SnapshotAnalysis) -> ComplexityFeatures:
    """Signed complexity/size deltas between two release snapshots.

    The cyclomatic average is function-weighted across the whole snapshot,
    not a mean of per-file means.
    """
    la, ld = line_churn(metrics_before, metrics_after)
    return ComplexityFeatures(
        ACYCD=metrics_after.cyclomatic_avg - metrics_before.cyclomatic_avg,
        CLCJD=metrics_after.loc - metrics_before.loc,
        CYCD=metrics_after.cyclomatic_total - metrics_before.cyclomatic_total,
        LA=la,
        LD=ld,
    )


# ---------------------------------------------------------------------------
# feature vectors and datasets

@dataclass
class FeatureVector:
    release_id: str
    package: str
    label: str
    features: dict[str, float]

    def as_row(self) -> list[float]:
        return [self.features[name] for name in FEATURE_NAMES]


@dataclass
class Dataset:
    packages: list[str]
    rows: list[FeatureVector]
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rows)

    def subset(self, package: str) -> "Dataset":
        rows = [r for r in self.rows if r.package == package]
        return Dataset(packages=[package], rows=rows,
                       provenance=dict(self.provenance))


def assemble(interval: ReleaseInterval,
             change_counts: ChangeTypeCounts | None,
             dep: DependencyFeatures | None,
             dev: DevelopmentFeatures | None,
             text: TextualFeatures | None,
             complexity: ComplexityFeatures | None,
             time_days: float | None) -> FeatureVector:
    """Merge the per-dimension records into one canonical feature vector."""
    parts = {"change": change_counts, "dependency": dep, "development": dev,
             "textual": text, "complexity": complexity, "time": time_days}
    missing = [k for k, v in parts.items() if v is None]
    if missing:
        raise IncompleteInputs(
            f"{interval.release_id}: missing components: {', '.join(missing)}")
    values: dict[str, float] = {}
    values.update({k: float(v) for k, v in change_counts.as_dict().items()})
    for rec in (dep, dev, text, complexity):
        for name in rec.__dataclass_fields__:
            values[name] = float(getattr(rec, name))
    values["RDTD"] = float(time_days)
    ordered = {name: values[name] for name in FEATURE_NAMES}
    bad = [k for k, v in ordered.items() if not math.isfinite(v)]
    if bad:
        raise IncompleteInputs(
            f"{interval.release_id}: non-finite features: {', '.join(bad)}")
    return FeatureVector(release_id=interval.release_id,
                         package=interval.package,
                         label=interval.label, features=ordered)


def _fmt(value: float) -> str:
    return format(float(value), ".9g")


def write_dataset(ds: Dataset, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(_META_COLUMNS + FEATURE_NAMES)]
    for row in ds.rows:
        lines.append(",".join(
            [row.release_id, row.package, row.label]
            + [_fmt(v) for v in row.as_row()]))
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    sidecar = dict(ds.provenance)
    sidecar.setdefault("tool_version", __version__)
    sidecar.setdefault("created_ts",
                       datetime.now(timezone.utc).isoformat())
    path.with_suffix(path.suffix + ".meta.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_dataset(path) -> Dataset:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise SchemaMismatch(f"cannot read dataset {path}: {exc}") from exc
    if not lines:
        raise SchemaMismatch(f"{path}: empty file")
    header = tuple(lines[0].split(","))
    expected = _META_COLUMNS + FEATURE_NAMES
    if header != expected:
        missing = set(expected) - set(header)
        extra = set(header) - set(expected)
        raise SchemaMismatch(
            f"{path}: header mismatch (missing: {sorted(missing)}, "
            f"unknown: {sorted(extra)}, order must be canonical)")
    rows = []
    seen = set()
    for ln, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(expected):
            raise SchemaMismatch(f"{path}:{ln}: expected {len(expected)} cells")
        release_id, package, label = cells[0], cells[1], cells[2]
        if label not in ReleaseType.LABELS:
            raise SchemaMismatch(f"{path}:{ln}: bad label {label!r}")
        if release_id in seen:
            raise SchemaMismatch(f"{path}:{ln}: duplicate release_id "
                                 f"{release_id!r}")
        seen.add(release_id)
        try:
            values = [float(c) for c in cells[3:]]
        except ValueError as exc:
            raise SchemaMismatch(f"{path}:{ln}: {exc}") from exc
        rows.append(FeatureVector(
            release_id=release_id, package=package, label=label,
            features=dict(zip(FEATURE_NAMES, values))))
    provenance = {}
    sidecar = path.with_suffix(path.suffix + ".meta.json")
    if sidecar.is_file():
        try:
            provenance = json.loads(sidecar.read_text(encoding="utf-8"))
        except ValueError:
            provenance = {}
    packages = sorted({r.package for r in rows})
    return Dataset(packages=packages, rows=rows, provenance=provenance)


# ---------------------------------------------------------------------------
# full extraction

def ingest_hash(store: ReleaseStore) -> str:
    h = hashlib.blake2b(digest_size=16)
    root = store.root
    if root is not None:
        for name in ("commits.jsonl", "releases.json", "events.jsonl"):
            f = Path(root) / name
            if f.is_file():
                h.update(name.encode())
                h.update(f.read_bytes())
    return h.hexdigest()


class FeatureExtractor:
    """Per-interval feature extraction with snapshot caches for one store."""

    def __init__(self, store: ReleaseStore):
        self.store = store
        self.warnings: list[str] = []
        self._analyses: dict[str, SnapshotAnalysis] = {}
        self._manifests: dict[str, dict[str, str]] = {}
        self._events_warned = False

    def _analysis(self, tree: str) -> SnapshotAnalysis:
        if tree not in self._analyses:
            self._analyses[tree] = analyze_snapshot(Snapshot.open(tree))
        return self._analyses[tree]

    def _manifest(self, tree: str) -> dict[str, str]:
        if tree not in self._manifests:
            deps, warn = read_manifest(Snapshot.open(tree))
            if warn:
                self.warnings.append(f"{tree}: {warn}")
            self._manifests[tree] = deps
        return self._manifests[tree]

    def vector(self, iv: ReleaseInterval) -> FeatureVector:
        counts, diff_warnings = release_change_counts(
            Snapshot.open(iv.tree_before), Snapshot.open(iv.tree_after))
        self.warnings.extend(diff_warnings)
        dep = dependency_features(iv, self._manifest(iv.tree_before),
                                  self._manifest(iv.tree_after))
        dev, ev_warn = development_features(iv, self.store.events)
        if ev_warn and not self._events_warned:
            self.warnings.append(ev_warn)
            self._events_warned = True
        text = textual_features(iv)
        comp = complexity_features(self._analysis(iv.tree_before),
                                   self._analysis(iv.tree_after))
        return assemble(iv, counts, dep, dev, text, comp, time_feature(iv))

    def change_counts(self, iv: ReleaseInterval) -> ChangeTypeCounts:
        counts, diff_warnings = release_change_counts(
            Snapshot.open(iv.tree_before), Snapshot.open(iv.tree_after))
        self.warnings.extend(diff_warnings)
        return counts


def extract_dataset(store: ReleaseStore) -> tuple[Dataset, list[str]]:
    """Run the whole feature pipeline over one package's store.

    Returns the dataset plus accumulated warnings (missing events export,
    malformed manifests, unreadable snapshot files). Deterministic: the
    same store always produces byte-identical rows.
    """
    timeline = build_release_timeline(store)
    fx = FeatureExtractor(store)
    rows = [fx.vector(iv) for iv in timeline.intervals]
    ds = Dataset(packages=[store.package], rows=rows,
                 provenance={"tool_version": __version__,
                             "ingest_hash": ingest_hash(store)})
    return ds, list(timeline.warnings) + fx.warnings
