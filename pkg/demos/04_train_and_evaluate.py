"""Classifiers, the cross-validation protocol, and the study statistics.

Run with: python demos/04_train_and_evaluate.py   (about a minute)
"""

import tempfile

from semverml.features import extract_dataset
from semverml.mining import load_store
from semverml.ml import (
    cliffs_delta,
    mann_whitney,
    roc_auc,
    smote,
)
from semverml.ml.data import binarize
from semverml.ml.models import train_model
from semverml.reporting import render_table, run_cross, run_within
from semverml.synth import generate_corpus

with tempfile.TemporaryDirectory() as td:
    stores = generate_corpus(td, n_packages=3, n_releases=60, seed=20)
    datasets = {name: extract_dataset(load_store(d))[0]
                for name, d in stores.items()}

    # a single one-vs-rest task, by hand: binarize, balance the training
    # class counts with SMOTE, fit, and score with the rank-statistic AUC
    ds = datasets["synthpkg0"]
    task = binarize(ds, "major")
    balanced, _ = smote(task, seed=1)
    model = train_model("gbt", balanced, seed=1)
    print(f"training rows {len(task)} -> {len(balanced)} after SMOTE; "
          f"training AUC = "
          f"{roc_auc(model.predict_scores(task.X), task.y):.3f}")

    # the full within-package protocol over every package and algorithm
    report = run_within(datasets, ("xgb", "rf", "zeror", "dt", "lr"),
                        ("major",), k=5, seed=7)
    print("\nwithin-package evaluation (major):\n")
    print(render_table(report))

    # algorithm-vs-baseline significance across packages
    xgb = report.column("major", "xgb")
    zr = report.column("major", "zeror")
    u, p = mann_whitney(xgb, zr)
    d, magnitude = cliffs_delta(xgb, zr)
    print(f"xgb vs zeror: U={u:.1f} p={p:.4f} delta={d:.2f} ({magnitude})")

    # leave-one-package-out generalization
    cross = run_cross(datasets, ("xgb", "zeror"), ("major",), seed=7)
    print("\ncross-package evaluation (major):\n")
    print(render_table(cross))
