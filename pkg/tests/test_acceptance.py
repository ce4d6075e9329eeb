"""Acceptance suite: one test per release criterion, each printing a
PASS line with its runtime (run with ``pytest tests/test_acceptance.py -v -s``).
"""

import itertools
import json
import time
from pathlib import Path

import numpy as np
import pytest

from _snapgen import random_pair, random_source
from conftest import EVAL_SEED
from semverml.cli import main
from semverml.features import (
    DIMENSIONS,
    FEATURE_NAMES,
    Dataset,
    FeatureVector,
    write_dataset,
)
from semverml.jsparse import cyclomatic, parse_js
from semverml.ml.data import BinaryDataset
from semverml.ml.metrics import (
    cliffs_delta,
    cliffs_magnitude,
    mann_whitney,
    roc_auc,
)
from semverml.ml.resample import smote
from semverml.ml.validation import evaluate_cross, evaluate_dimension
from semverml.semver import (
    GREATER,
    LESS,
    ReleaseType,
    compare,
    label_transition,
    parse_version,
)
from semverml.treediff import Snapshot, diff_js_sources, release_change_counts

GOLDEN = sorted(Path(__file__).parent.joinpath("golden").iterdir())


def _report(num, detail, elapsed, limit):
    print(f"PASS criterion {num}: {detail} [{elapsed:.1f}s < {limit}s]")
    assert elapsed < limit, f"criterion {num} exceeded {limit}s"


def test_criterion_01_semver_conformance():
    t0 = time.perf_counter()
    base = parse_version("3.2.1")
    for text in ("4.0.0", "3.3.1", "3.2.2"):
        assert compare(base, parse_version(text)) == LESS
    for text in ("2.2.1", "3.1.1", "3.2.0"):
        assert compare(base, parse_version(text)) == GREATER
    assert label_transition(parse_version("1.1.1"),
                            parse_version("2.1.1")) == ReleaseType.MAJOR
    assert label_transition(parse_version("3.2.6"),
                            parse_version("3.3.6")) == ReleaseType.MINOR
    _report(1, "precedence and transition examples exact",
            time.perf_counter() - t0, 1.0)


def test_criterion_02_roc_auc_oracle_equivalence():
    t0 = time.perf_counter()

    def brute(scores, labels):
        pos = scores[labels == 1]
        neg = scores[labels == 0]
        wins = 0.0
        for p in pos:
            wins += (p > neg).sum() + 0.5 * (p == neg).sum()
        return wins / (len(pos) * len(neg))

    rng = np.random.default_rng(202)
    worst = 0.0
    for trial in range(500):
        n = int(rng.integers(2, 31))
        if trial % 2:
            scores = rng.integers(0, 4, size=n).astype(float)  # many ties
        else:
            scores = rng.normal(size=n)
        labels = rng.integers(0, 2, size=n)
        if len(np.unique(labels)) < 2:
            labels[0], labels[1] = 0, 1
        worst = max(worst, abs(roc_auc(scores, labels)
                               - brute(scores, labels)))
    assert worst <= 1e-12
    _report(2, f"500 random sets, max |rank - brute| = {worst:.2e}",
            time.perf_counter() - t0, 5.0)


def _segment_distance(point, a, b):
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(point - a))
    t = float(np.clip((point - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(point - (a + t * ab)))


def test_criterion_03_smote_properties():
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    checked = 0
    for trial in range(200):
        n_min = int(rng.integers(2, 12))
        n_maj = n_min + int(rng.integers(1, 25))
        d = int(rng.integers(2, 8))
        X = np.vstack([rng.normal(2, 1, size=(n_min, d)),
                       rng.normal(-2, 1, size=(n_maj, d))])
        y = np.array([1] * n_min + [0] * n_maj)
        ds = BinaryDataset(X, y, [f"r{i}" for i in range(len(y))],
                           tuple(f"f{j}" for j in range(d)))
        out, warn = smote(ds, k=5, seed=trial)
        assert warn is None
        assert (out.y == 1).sum() == (out.y == 0).sum() == n_maj
        minority = X[:n_min]
        k_eff = min(5, n_min - 1)
        d2 = ((minority[:, None, :] - minority[None, :, :]) ** 2).sum(axis=2)
        np.fill_diagonal(d2, np.inf)
        nn = np.argsort(d2, axis=1, kind="stable")[:, :k_eff]
        for row in out.X[len(y):]:
            best = min(_segment_distance(row, minority[i], minority[j])
                       for i in range(n_min) for j in nn[i])
            assert best < 1e-9
            checked += 1
    _report(3, f"200 resampled sets, {checked} synthetic rows on segments",
            time.perf_counter() - t0, 10.0)


def test_criterion_04_statistics_oracles():
    t0 = time.perf_counter()
    # exact Mann-Whitney vs full enumeration, every arrangement, n1+n2 <= 10
    def pair_u(first, rest):
        return sum(1.0 if x > y else 0.5 if x == y else 0.0
                   for x in first for y in rest)

    cases = 0
    for n in range(2, 11):
        values = [float(v) for v in range(1, n + 1)]
        for n1 in range(1, n):
            all_us = []
            arrangements = list(itertools.combinations(range(n), n1))
            for combo in arrangements:
                chosen = set(combo)
                a = [values[i] for i in combo]
                b = [values[i] for i in range(n) if i not in chosen]
                all_us.append(pair_u(a, b))
            total = len(arrangements)
            n2 = n - n1
            for combo, u_obs in zip(arrangements, all_us):
                chosen = set(combo)
                a = [values[i] for i in combo]
                b = [values[i] for i in range(n) if i not in chosen]
                u_lo = min(u_obs, n1 * n2 - u_obs)
                oracle_p = min(1.0, 2.0 * sum(
                    1 for u in all_us if u <= u_lo + 1e-12) / total)
                u_impl, p_impl = mann_whitney(a, b)
                assert abs(u_impl - u_obs) <= 1e-12
                assert abs(p_impl - oracle_p) <= 1e-12
                cases += 1

    rng = np.random.default_rng(404)
    for _ in range(200):
        a = rng.integers(0, 7, size=int(rng.integers(1, 9))).astype(float)
        b = rng.integers(0, 7, size=int(rng.integers(1, 9))).astype(float)
        gt = sum(1 for x in a for y in b if x > y)
        lt = sum(1 for x in a for y in b if x < y)
        d, _ = cliffs_delta(a, b)
        assert d == (gt - lt) / (len(a) * len(b))
    assert cliffs_magnitude(0.329) == "small"
    assert cliffs_magnitude(0.33) == "medium"
    assert cliffs_magnitude(0.474) == "large"
    _report(4, f"{cases} exact Mann-Whitney arrangements + Cliff's delta",
            time.perf_counter() - t0, 30.0)


def test_criterion_05_change_type_golden_corpus():
    t0 = time.perf_counter()
    assert len(GOLDEN) >= 20
    for case in GOLDEN:
        expected = json.loads((case / "expected.json").read_text())
        got, _ = release_change_counts(Snapshot.open(case / "before"),
                                       Snapshot.open(case / "after"))
        assert got.as_dict() == expected, case.name

    for seed in range(100):
        src = random_source(5000 + seed)
        assert diff_js_sources(src, src, "x.js").is_zero()

    swapped = [("ADM", "DEM"), ("GVA", "GVD"), ("ICC", "DCC"),
               ("MLA", "MLD"), ("AJF", "DJF"), ("ANJF", "DNJF")]
    preserved = ["MJF", "MNJF", "MNC", "MOM", "MCC"]
    for seed in range(200):
        before, after = random_pair(6000 + seed)
        fwd = diff_js_sources(before, after, "x.js").as_dict()
        rev = diff_js_sources(after, before, "x.js").as_dict()
        for x, y in swapped:
            assert fwd[x] == rev[y] and fwd[y] == rev[x]
        for name in preserved:
            assert fwd[name] == rev[name]
    _report(5, f"{len(GOLDEN)} golden pairs exact; identity x100; "
            "symmetry x200", time.perf_counter() - t0, 20.0)


def test_criterion_06_cyclomatic_conformance():
    t0 = time.perf_counter()
    # (source, decision points): every decision-point kind appears
    fixture = [
        ("function c01() { return 1; }", 0),
        ("function c02(x) { if (x) { return 1; } return 0; }", 1),
        ("function c03(x) { if (x) { return 1; } else if (x > 2) "
         "{ return 2; } return 0; }", 2),
        ("function c04(n) { for (let i = 0; i < n; i++) { use(i); } }", 1),
        ("function c05(o) { for (const k in o) { use(k); } }", 1),
        ("function c06(xs) { for (const v of xs) { use(v); } }", 1),
        ("function c07(n) { while (n > 0) { n--; } }", 1),
        ("function c08(n) { do { n--; } while (n > 0); }", 2),
        ("function c09(k) { switch (k) { case 1: return 1; case 2: "
         "return 2; default: return 0; } }", 2),
        ("function c10() { try { risky(); } catch (e) { log(e); } }", 1),
        ("function c11(x) { return x ? 1 : 0; }", 1),
        ("function c12(a, b) { return a && b; }", 1),
        ("function c13(a, b) { return a || b; }", 1),
        ("function c14(a, b) { return a && b ? a : b; }", 2),
        ("function c15(x, n) { if (x) { for (let i = 0; i < n; i++) "
         "{ x = x && i; } } return x || n; }", 4),
    ]
    assert len(fixture) == 15
    ast = parse_js("\n".join(src for src, _ in fixture), "fixture.js")
    per = {f.name: v for f, v in cyclomatic(ast)["per_function"].items()}
    assert len(per) == 15
    for i, (_, decisions) in enumerate(fixture, 1):
        name = f"c{i:02d}"
        assert per[name] == decisions + 1, (name, per[name], decisions + 1)
    _report(6, "15-function fixture matches decision points + 1 exactly",
            time.perf_counter() - t0, 5.0)


def _written_corpus_csv(planted_corpus, tmp_path) -> Path:
    rows = []
    packages = []
    for name in sorted(planted_corpus.datasets):
        ds = planted_corpus.datasets[name]
        rows.extend(ds.rows)
        packages.extend(ds.packages)
    merged = Dataset(packages=sorted(packages), rows=rows)
    path = tmp_path / "corpus.csv"
    write_dataset(merged, path)
    return path


def _read_eval(path: Path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")[1:]
    cells = {}
    for line in lines[1:]:
        parts = line.split(",")
        for col, cell in zip(header, parts[1:]):
            target, algo = col.split("_", 1)
            cells.setdefault((target, algo), {})[parts[0]] = \
                float(cell) if cell else None
    return cells


def test_criterion_07_planted_signal_within(planted_corpus, tmp_path):
    t0 = time.perf_counter()
    csv_path = _written_corpus_csv(planted_corpus, tmp_path)
    reports = tmp_path / "reports"
    rc = main(["evaluate", "--dataset", str(csv_path),
               "--reports", str(reports), "--mode", "within",
               "--algo", "all", "--target", "major,minor",
               "--folds", "5", "--seed", str(EVAL_SEED)])
    assert rc == 0
    cells = _read_eval(reports / "within_eval.csv")

    def mean_of(target, algo):
        vals = [v for v in cells[(target, algo)].values() if v is not None]
        return float(np.mean(vals))

    for algo in ("xgb", "rf"):
        assert mean_of("major", algo) >= 0.90, (algo, mean_of("major", algo))
        assert mean_of("minor", algo) >= 0.80, (algo, mean_of("minor", algo))
    for target in ("major", "minor"):
        for auc in cells[(target, "zeror")].values():
            assert abs(auc - 0.5) <= 0.05
        rel = [cells[(target, "xgb")][p] / cells[(target, "zeror")][p]
               for p in cells[(target, "xgb")]]
        assert float(np.mean(rel)) > 1.4

    overall = {algo: float(np.mean([mean_of(t, algo)
                                    for t in ("major", "minor")]))
               for algo in ("xgb", "rf", "dt", "lr", "zeror")}
    assert overall["xgb"] >= overall["rf"], overall
    assert overall["rf"] > overall["dt"], overall
    assert overall["rf"] > overall["lr"], overall
    assert overall["dt"] > overall["zeror"], overall
    assert overall["lr"] > overall["zeror"], overall

    elapsed = time.perf_counter() - t0 + planted_corpus.build_seconds
    _report(7, "within-package: xgb/rf clear baseline by >1.4x, ordering "
            f"xgb>=rf>dt,lr>zeror {dict((k, round(v, 3)) for k, v in overall.items())}",
            elapsed, 120.0)


def test_criterion_08_dimension_ablation():
    t0 = time.perf_counter()
    rng = np.random.default_rng(808)
    rows = []
    for i in range(400):
        r = rng.random()
        label = "major" if r < 0.12 else "minor" if r < 0.42 else "patch"
        feats = {name: float(rng.poisson(1.5)) for name in FEATURE_NAMES}
        feats["AML"] = float(rng.normal(40, 8))
        feats["RDTD"] = float(rng.uniform(0.5, 20))
        if label == "major":
            feats["DEM"] += float(rng.poisson(5) + 4)
            feats["GVD"] += float(rng.poisson(3) + 2)
        if label == "minor":
            feats["ADM"] += float(rng.poisson(5) + 4)
        rows.append(FeatureVector(f"abl@{i}", "abl", label, feats))
    ds = Dataset(packages=["abl"], rows=rows)

    aucs = {}
    for dim in (*DIMENSIONS, "all"):
        res = evaluate_dimension(ds, dim, "gbt", "major", k=5,
                                 seed=EVAL_SEED)
        aucs[dim] = res.mean_auc
    for dim in DIMENSIONS:
        if dim == "change_type":
            continue
        assert aucs["change_type"] >= aucs[dim] + 0.1, aucs
    assert aucs["all"] >= aucs["change_type"] - 0.02, aucs
    _report(8, "change-type dominates by >=0.1; all-features within 0.02 "
            f"({ {k: round(v, 3) for k, v in aucs.items()} })",
            time.perf_counter() - t0, 120.0)


def test_criterion_09_cross_package_protocol(planted_corpus):
    t0 = time.perf_counter()
    datasets = planted_corpus.datasets
    res = evaluate_cross(datasets, "gbt", "major", seed=EVAL_SEED)
    for pkg, auc in res.per_package.items():
        assert auc is not None and auc >= 0.85, (pkg, auc)

    # explicit leakage audit on the reconstructed pools
    names = sorted(datasets)
    for held in names:
        held_ids = {r.release_id for r in datasets[held].rows}
        pool_ids = {r.release_id for other in names if other != held
                    for r in datasets[other].rows}
        assert not held_ids & pool_ids

    again = evaluate_cross(datasets, "gbt", "major", seed=EVAL_SEED)
    assert again.per_package == res.per_package
    _report(9, "leave-one-package-out GBT major >= 0.85 on all 4 holdouts, "
            f"replay identical ({ {k: round(v, 3) for k, v in res.per_package.items()} })",
            time.perf_counter() - t0, 120.0)


def test_criterion_10_reproducibility(tmp_path):
    from semverml.synth import generate_corpus

    t0 = time.perf_counter()
    stores = generate_corpus(tmp_path / "corpus", n_packages=2,
                             n_releases=40, seed=11)

    def run(tag: str) -> dict[str, bytes]:
        base = tmp_path / tag
        dataset = base / "data.csv"
        models = base / "models"
        reports = base / "reports"
        store_args = []
        for store_dir in stores.values():
            store_args += ["--store", str(store_dir)]
        assert main(["extract", *store_args, "--dataset", str(dataset),
                     "--seed", "21"]) == 0
        assert main(["train", "--dataset", str(dataset), "--models",
                     str(models), "--algo", "xgb", "--target", "all",
                     "--seed", "21"]) == 0
        assert main(["evaluate", "--dataset", str(dataset), "--reports",
                     str(reports), "--mode", "within", "--algo", "xgb",
                     "--target", "major", "--folds", "5",
                     "--seed", "21"]) == 0
        out = {"dataset.csv": dataset.read_bytes()}
        for p in sorted(models.glob("*.json")):
            out[f"models/{p.name}"] = p.read_bytes()
        for name in ("within_eval.csv", "within_stats.csv"):
            out[f"reports/{name}"] = (reports / name).read_bytes()
        return out

    first = run("run1")
    second = run("run2")
    assert sorted(first) == sorted(second)
    for name in first:
        assert first[name] == second[name], f"{name} differs between runs"
    _report(10, f"two pipeline runs byte-identical across "
            f"{len(first)} artifacts", time.perf_counter() - t0, 240.0)
