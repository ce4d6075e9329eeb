"""The whole pipeline through the command-line surface, including the
pre-release predictor.

Run with: python demos/05_cli_pipeline.py   (about a minute)
"""

import json
import shutil
import tempfile
from pathlib import Path

from semverml.cli import main
from semverml.synth import generate_package


def run(argv):
    print(f"\n$ semverml {' '.join(argv)}")
    rc = main(argv)
    assert rc == 0, f"exit code {rc}"


with tempfile.TemporaryDirectory() as td:
    td = Path(td)
    store = generate_package(td, "clipkg", n_releases=90, seed=13,
                             trailing_commits=5)
    dataset = td / "clipkg.csv"
    models = td / "models"
    reports = td / "reports"

    run(["label", "--store", str(store)])
    run(["extract", "--store", str(store), "--dataset", str(dataset),
         "--seed", "7"])
    run(["train", "--dataset", str(dataset), "--models", str(models),
         "--algo", "xgb", "--target", "all", "--seed", "7"])
    run(["evaluate", "--dataset", str(dataset), "--reports", str(reports),
         "--mode", "within", "--algo", "xgb,dt", "--target", "major",
         "--folds", "5", "--seed", "7"])
    run(["report", "--reports", str(reports), "--mode", "within"])

    # Point the predictor at a working tree: here, the last release
    # snapshot with several public functions deleted and nothing added,
    # which is exactly the fingerprint of a breaking release.
    payload = json.loads((store / "releases.json").read_text())
    last_tree = Path(payload["releases"][-1]["tree"])
    worktree = td / "worktree"
    shutil.copytree(last_tree, worktree)
    core = worktree / "lib" / "core.js"
    source = core.read_text().split("\n\n")
    removed = [p for p in source if p.startswith("function")][:5]
    core.write_text("\n\n".join(p for p in source if p not in removed))
    print(f"\n(working tree: deleted {len(removed)} functions from lib/core.js)")

    run(["predict", "--repo", str(worktree), "--store", str(store),
         "--models", str(models), "--algo", "xgb"])
