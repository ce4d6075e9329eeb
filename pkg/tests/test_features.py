from datetime import datetime, timezone

import pytest

from semverml.errors import IncompleteInputs, SchemaMismatch
from semverml.features import (
    CHANGE_TYPE_FEATURES,
    DIMENSIONS,
    Dataset,
    FEATURE_NAMES,
    FeatureVector,
    analyze_snapshot,
    assemble,
    complexity_features,
    extract_dataset,
    read_dataset,
    write_dataset,
)
from semverml.mining import (
    DependencyFeatures,
    DevelopmentFeatures,
    ReleaseInterval,
    TextualFeatures,
)
from semverml.semver import parse_version
from semverml.treediff import ChangeTypeCounts, Snapshot


def make_interval():
    return ReleaseInterval(
        package="demo", version=parse_version("1.2.3"),
        publish_time=datetime(2020, 2, 1, tzinfo=timezone.utc),
        label="minor", commits=[], tree_before="", tree_after="",
        prev_version=parse_version("1.1.0"),
        prev_publish_time=datetime(2020, 1, 1, tzinfo=timezone.utc))


def zero_components():
    return dict(
        change_counts=ChangeTypeCounts(),
        dep=DependencyFeatures(0, 0, 0, 0),
        dev=DevelopmentFeatures(0, 0, 0, 0, 0, 0),
        text=TextualFeatures(0, 0, 0, 0, 0.0),
        complexity=complexity_features(
            analyze_snapshot(Snapshot.open(None)),
            analyze_snapshot(Snapshot.open(None))),
        time_days=0.0,
    )


class TestDimensionPartition:
    def test_sizes(self):
        sizes = {dim: len(names) for dim, names in DIMENSIONS.items()}
        assert sizes == {"change_type": 20, "dependency": 4, "complexity": 5,
                         "time": 1, "development": 6, "textual": 5}

    def test_partition_is_exact(self):
        seen = [n for names in DIMENSIONS.values() for n in names]
        assert sorted(seen) == sorted(FEATURE_NAMES)
        assert len(FEATURE_NAMES) == 41

    def test_canonical_order_starts_with_change_type(self):
        assert FEATURE_NAMES[:20] == CHANGE_TYPE_FEATURES
        assert FEATURE_NAMES[-5:] == ("NBF", "KWM", "KWP", "KWB", "AML")


class TestComplexityFeatures:
    def snap(self, tmp_path, name, files):
        d = tmp_path / name
        d.mkdir()
        for rel, content in files.items():
            (d / rel).write_text(content)
        return analyze_snapshot(Snapshot.open(d))

    def test_identity(self, tmp_path):
        src = "function f(x) {\n  return x;\n}\n"
        b = self.snap(tmp_path, "b", {"a.js": src})
        a = self.snap(tmp_path, "a", {"a.js": src})
        c = complexity_features(b, a)
        assert (c.ACYCD, c.CLCJD, c.CYCD, c.LA, c.LD) == (0, 0, 0, 0, 0)

    def test_added_branch_and_lines(self, tmp_path):
        before = "function f(x) {\n  return x;\n}\n"
        after = ("function f(x) {\n  const extra = 1;\n"
                 "  if (extra) { use(extra); }\n  return x;\n}\n")
        b = self.snap(tmp_path, "b", {"a.js": before})
        a = self.snap(tmp_path, "a", {"a.js": after})
        c = complexity_features(b, a)
        assert c.CYCD == 1
        assert c.CLCJD == 2
        assert (c.LA, c.LD) == (2, 0)

    def test_deleting_only_file(self, tmp_path):
        src = ("function a(x) { return x ? 1 : 0; }\n"
               "function b(y) {\n  if (y) { return y; }\n  return 0;\n}\n"
               "function c() { return 3; }\n")
        b = self.snap(tmp_path, "b", {"only.js": src})
        a = self.snap(tmp_path, "a", {})
        assert b.cyclomatic_total == 5 and b.function_count == 3
        c = complexity_features(b, a)
        assert c.CYCD == -5
        assert c.LD == b.loc and c.LA == 0

    def test_function_weighted_average(self, tmp_path):
        b = self.snap(tmp_path, "b", {
            "one.js": "function f() { return 1; }\n",
            "two.js": "function g(x) { return x && x ? 1 : 0; }\n",
        })
        # 2 functions, complexities 1 and 3: release-wide mean 2.0
        assert b.cyclomatic_avg == 2.0


class TestAssemble:
    def test_all_zero_components(self):
        fv = assemble(make_interval(), **zero_components())
        assert fv.label == "minor"
        assert list(fv.features) == list(FEATURE_NAMES)
        assert all(v == 0 for v in fv.features.values())

    def test_missing_component_raises(self):
        parts = zero_components()
        parts["dep"] = None
        with pytest.raises(IncompleteInputs):
            assemble(make_interval(), **parts)

    def test_deterministic(self):
        a = assemble(make_interval(), **zero_components())
        b = assemble(make_interval(), **zero_components())
        assert a == b


class TestDatasetIO:
    def rows(self):
        vals = {name: float(i) for i, name in enumerate(FEATURE_NAMES)}
        vals["ACYCD"] = -1.53125        # negative deltas permitted
        vals["AML"] = 12.3456789
        return [
            FeatureVector("demo@1.0.1", "demo", "patch", dict(vals)),
            FeatureVector("demo@1.1.0", "demo", "minor",
                          {k: 0.0 for k in FEATURE_NAMES}),
        ]

    def test_round_trip(self, tmp_path):
        ds = Dataset(packages=["demo"], rows=self.rows())
        path = write_dataset(ds, tmp_path / "d.csv")
        back = read_dataset(path)
        assert back.packages == ["demo"]
        assert [r.release_id for r in back.rows] == \
            [r.release_id for r in ds.rows]
        for orig, rt in zip(ds.rows, back.rows):
            assert rt.label == orig.label
            for name in FEATURE_NAMES:
                assert rt.features[name] == pytest.approx(
                    orig.features[name], rel=1e-9)

    def test_missing_column_rejected(self, tmp_path):
        ds = Dataset(packages=["demo"], rows=self.rows())
        path = write_dataset(ds, tmp_path / "d.csv")
        lines = path.read_text().splitlines()
        header = lines[0].split(",")
        drop = header.index("GVA")
        broken = [",".join(c for i, c in enumerate(line.split(","))
                           if i != drop) for line in lines]
        path.write_text("".join(l + "\n" for l in broken))
        with pytest.raises(SchemaMismatch):
            read_dataset(path)

    def test_empty_dataset_header_only(self, tmp_path):
        path = write_dataset(Dataset(packages=[], rows=[]),
                             tmp_path / "empty.csv")
        text = path.read_text().splitlines()
        assert len(text) == 1
        assert read_dataset(path).rows == []

    def test_duplicate_release_id_rejected(self, tmp_path):
        rows = self.rows()
        rows[1] = FeatureVector("demo@1.0.1", "demo", "minor",
                                {k: 0.0 for k in FEATURE_NAMES})
        path = write_dataset(Dataset(packages=["demo"], rows=rows),
                             tmp_path / "dup.csv")
        with pytest.raises(SchemaMismatch):
            read_dataset(path)


class TestEndToEndExtraction:
    def test_small_synthetic_package(self, tmp_path):
        from semverml.mining import load_store
        from semverml.synth import generate_package

        store_dir = generate_package(tmp_path, "mini", n_releases=12, seed=3)
        ds, warnings = extract_dataset(load_store(store_dir))
        assert len(ds) == 11
        assert ds.packages == ["mini"]
        for row in ds.rows:
            assert row.label in ("major", "minor", "patch")
            assert set(row.features) == set(FEATURE_NAMES)
        # determinism: same store, same rows
        ds2, _ = extract_dataset(load_store(store_dir))
        assert [r.features for r in ds2.rows] == [r.features for r in ds.rows]
