"""Command-line surface tying the pipeline together.

Subcommands mirror the pipeline stages::

    semverml ingest   --repo R --registry M --store S [--events E]
    semverml label    --store S
    semverml extract  --store S [--store S2 ...] --dataset D.csv
    semverml train    --dataset D.csv --models M/ [--algo xgb] [--target all]
    semverml evaluate --dataset D.csv --reports R/ --mode within|dimension|cross
    semverml report   --reports R/ [--mode within]
    semverml predict  --repo WORKTREE --store S --models M/ [--since 1.2.3]

Exit codes: 0 success, 1 internal error, 2 bad input. Every random choice
derives from one ``--seed`` (flag, else config file, else the
``SEMVERML_SEED`` environment variable, else 0), and the seed is echoed
into report sidecars. Options may also come from a ``key = value`` config
file via ``--config``; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import (
    EmptyTimeline,
    InputError,
    NoModel,
    NoPriorRelease,
    SingleClassInput,
)
from .features import (
    Dataset,
    FeatureExtractor,
    extract_dataset,
    read_dataset,
    write_dataset,
)
from .mining import (
    ReleaseInterval,
    build_release_timeline,
    format_ts,
    ingest_repo,
    load_store,
)
from .ml.data import binarize
from .ml.models import load_model, save_model, train_model
from .ml.resample import smote
from .ml.validation import OVR_ORDER, ovr_predict
from .reporting import (
    ALGO_ORDER,
    CLI_TO_ENGINE,
    TARGETS,
    render_dimension_table,
    render_table,
    run_cross,
    run_dimension,
    run_within,
    write_report_files,
)
from .semver import ReleaseType

SEED_ENV = "SEMVERML_SEED"


def _parse_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; '#' starts a comment; quotes optional."""
    out: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{ln}: expected key = value")
        key, value = line.split("=", 1)
        value = value.strip().strip("\"'")
        out[key.strip()] = value
    return out


def _split_choices(value: str, allowed, what: str) -> list[str]:
    names = [v.strip() for v in value.split(",") if v.strip()]
    if "all" in names:
        return list(allowed)
    bad = [n for n in names if n not in allowed]
    if bad:
        raise InputError(f"unknown {what}: {', '.join(bad)} "
                         f"(choose from {', '.join(allowed)} or all)")
    return names


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semverml",
        description="Mine release histories and classify releases as "
                    "major, minor, or patch.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value option file")
        p.add_argument("--seed", type=int, default=None,
                       help=f"master seed (default: config, then "
                            f"${SEED_ENV}, then 0)")

    p = sub.add_parser("ingest", help="build the canonical store")
    common(p)
    p.add_argument("--repo", required=True,
                   help="git clone, commits.jsonl, or directory holding one")
    p.add_argument("--registry", required=True,
                   help="registry metadata JSON with per-release snapshots")
    p.add_argument("--events", default=None,
                   help="optional issue/PR activity export (JSONL)")
    p.add_argument("--store", required=True, help="output store directory")

    p = sub.add_parser("label", help="label the release timeline")
    common(p)
    p.add_argument("--store", required=True)

    p = sub.add_parser("extract", help="extract the feature dataset")
    common(p)
    p.add_argument("--store", required=True, action="append",
                   help="store directory (repeat for a multi-package corpus)")
    p.add_argument("--dataset", required=True, help="output CSV path")

    p = sub.add_parser("train", help="train and persist classifiers")
    common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--models", required=True, help="output model directory")
    p.add_argument("--algo", default=None,
                   help="xgb|rf|dt|lr|zeror, comma list, or all "
                        "(default: xgb)")
    p.add_argument("--target", default=None,
                   help="major|minor|patch, comma list, or all "
                        "(default: all)")

    p = sub.add_parser("evaluate", help="run an evaluation protocol")
    common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--reports", required=True, help="output report directory")
    p.add_argument("--mode", default=None,
                   choices=("within", "dimension", "cross"))
    p.add_argument("--algo", default=None,
                   help="algorithms to evaluate (baseline always included); "
                        "dimension mode uses the first entry (default: all)")
    p.add_argument("--target", default=None)
    p.add_argument("--dimension", default=None,
                   help="dimension-mode filter: one dimension or all")
    p.add_argument("--folds", type=int, default=None)

    p = sub.add_parser("report", help="render report CSVs as a text table")
    common(p)
    p.add_argument("--reports", required=True)
    p.add_argument("--mode", default=None,
                   choices=("within", "dimension", "cross"))

    p = sub.add_parser("predict", help="suggest the type for unreleased work")
    common(p)
    p.add_argument("--repo", required=True, help="working tree to classify")
    p.add_argument("--store", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--algo", default=None, help="model to load (default: xgb)")
    p.add_argument("--since", default=None,
                   help="base release version (default: latest release)")
    return parser


def _resolve_seed(args, config: dict) -> int:
    if args.seed is not None:
        return args.seed
    if "seed" in config:
        try:
            return int(config["seed"])
        except ValueError as exc:
            raise InputError(f"config seed is not an integer: "
                             f"{config['seed']!r}") from exc
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise InputError(f"${SEED_ENV} is not an integer: {env!r}") \
                from exc
    return 0


# fallbacks applied after the config file, so flags > config > defaults
_FALLBACKS = {
    "train": {"algo": "xgb", "target": "all"},
    "evaluate": {"algo": "all", "target": "all", "dimension": "all",
                 "mode": "within", "folds": 5},
    "report": {"mode": "within"},
    "predict": {"algo": "xgb"},
}


def _apply_option_layers(args, config: dict):
    for key in _CONFIG_KEYS:
        if hasattr(args, key) and getattr(args, key) in (None, []) \
                and key in config:
            setattr(args, key, config[key])
    for key, value in _FALLBACKS.get(args.command, {}).items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


# ---------------------------------------------------------------------------
# commands

def cmd_ingest(args, seed: int) -> int:
    store = ingest_repo(args.repo, args.registry, args.store,
                        events_path=args.events)
    log = (store / "ingest.log").read_text(encoding="utf-8")
    print(f"store written to {store}")
    if log.strip():
        print(log.strip())
    return 0


def cmd_label(args, seed: int) -> int:
    store = load_store(args.store)
    timeline = build_release_timeline(store)
    counts = timeline.label_counts()
    labeled = sum(counts.values())
    payload = {
        "package": store.package,
        "intervals": [
            {
                "version": str(iv.version),
                "ts": format_ts(iv.publish_time),
                "label": iv.label,
                "prev_version": str(iv.prev_version),
                "commits": len(iv.commits),
            }
            for iv in timeline.intervals
        ],
        "dropped": [{"version": v, "reason": r} for v, r in timeline.dropped],
    }
    out = Path(args.store) / "timeline.json"
    out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"package: {store.package}")
    print(f"labeled releases: {labeled} "
          f"(major {counts[ReleaseType.MAJOR]}, "
          f"minor {counts[ReleaseType.MINOR]}, "
          f"patch {counts[ReleaseType.PATCH]}); "
          f"dropped {len(timeline.dropped)}")
    if labeled:
        pct = [100.0 * counts[k] / labeled for k in
               (ReleaseType.MAJOR, ReleaseType.MINOR, ReleaseType.PATCH)]
        print(f"major/minor/patch %: {pct[0]:.1f}/{pct[1]:.1f}/{pct[2]:.1f}")
    for w in timeline.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"timeline written to {out}")
    return 0


def cmd_extract(args, seed: int) -> int:
    stores = args.store if isinstance(args.store, list) else [args.store]
    all_rows = []
    packages = []
    provenance: dict = {"tool_version": __version__, "seed": seed,
                        "ingest_hash": {}}
    for store_dir in stores:
        store = load_store(store_dir)
        try:
            ds, warnings = extract_dataset(store)
        except EmptyTimeline as exc:
            print(f"warning: {exc}; emitting empty dataset",
                  file=sys.stderr)
            ds, warnings = Dataset(packages=[store.package], rows=[]), []
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
        all_rows.extend(ds.rows)
        packages.extend(ds.packages)
        if "ingest_hash" in ds.provenance:
            provenance["ingest_hash"][store.package] = \
                ds.provenance["ingest_hash"]
    merged = Dataset(packages=sorted(set(packages)), rows=all_rows,
                     provenance=provenance)
    path = write_dataset(merged, args.dataset)
    print(f"dataset with {len(merged)} rows "
          f"({len(merged.packages)} packages) written to {path}")
    return 0


def cmd_train(args, seed: int) -> int:
    ds = read_dataset(args.dataset)
    algos = _split_choices(args.algo, ALGO_ORDER, "algorithm")
    targets = _split_choices(args.target, TARGETS, "target")
    out = Path(args.models)
    for target in targets:
        bds = binarize(ds, target)
        for algo in algos:
            resampled, warn = smote(bds, seed=seed)
            if warn:
                print(f"warning: {target}/{algo}: {warn}", file=sys.stderr)
            model = train_model(CLI_TO_ENGINE[algo], resampled, seed=seed)
            path = save_model(model, out / f"{target}_{algo}.json")
            print(f"saved {path}")
    return 0


def cmd_evaluate(args, seed: int) -> int:
    ds = read_dataset(args.dataset)
    folds = args.folds
    if folds < 2:
        raise InputError("--folds must be at least 2")
    algos = _split_choices(args.algo, ALGO_ORDER, "algorithm")
    targets = _split_choices(args.target, TARGETS, "target")
    datasets = {pkg: ds.subset(pkg) for pkg in ds.packages}
    if args.mode == "within":
        ordered = [a for a in ALGO_ORDER
                   if a in set(algos) | {"zeror"}]
        report = run_within(datasets, ordered, targets, folds, seed)
        write_report_files(args.reports, "within", seed, folds,
                           report=report)
        print(render_table(report))
    elif args.mode == "cross":
        if len(datasets) < 2:
            raise InputError("cross mode needs at least 2 packages")
        ordered = [a for a in ALGO_ORDER if a in set(algos) | {"zeror"}]
        report = run_cross(datasets, ordered, targets, seed)
        write_report_files(args.reports, "cross", seed, 0, report=report)
        print(render_table(report))
    else:
        algo = algos[0]
        dims = None if args.dimension == "all" else [args.dimension]
        rows = run_dimension(datasets, algo, targets, folds, seed,
                             dimensions=dims)
        write_report_files(args.reports, "dimension", seed, folds,
                           dim_rows=rows)
        print(render_dimension_table(rows))
    print(f"reports written to {args.reports} (seed {seed})")
    return 0


def cmd_report(args, seed: int) -> int:
    reports = Path(args.reports)
    eval_path = reports / f"{args.mode}_eval.csv"
    if not eval_path.is_file():
        raise InputError(f"no {args.mode} evaluation at {eval_path}; "
                         "run `semverml evaluate` first")
    if args.mode == "dimension":
        rows = []
        lines = eval_path.read_text(encoding="utf-8").splitlines()
        for line in lines[1:]:
            pkg, target, dim, algo, auc, excl = line.split(",")
            rows.append({"package": pkg, "target": target, "dimension": dim,
                         "algorithm": algo,
                         "mean_auc": float(auc) if auc else float("nan"),
                         "n_excluded": int(excl)})
        print(render_dimension_table(rows))
        return 0
    lines = eval_path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")[1:]
    targets, algorithms = [], []
    for col in header:
        t, a = col.split("_", 1)
        if t not in targets:
            targets.append(t)
        if a not in algorithms:
            algorithms.append(a)
    from .reporting import EvalReport
    cells = {}
    packages = []
    for line in lines[1:]:
        parts = line.split(",")
        pkg = parts[0]
        packages.append(pkg)
        for col, cell in zip(header, parts[1:]):
            t, a = col.split("_", 1)
            cells[(pkg, t, a)] = float(cell) if cell else None
    report = EvalReport(mode=args.mode, targets=tuple(targets),
                        algorithms=tuple(algorithms), cells=cells,
                        packages=tuple(packages), seed=seed, folds=0)
    print(render_table(report))
    stats_path = reports / f"{args.mode}_stats.csv"
    if stats_path.is_file():
        print("significance vs baseline:")
        print(stats_path.read_text(encoding="utf-8"))
    return 0


def cmd_predict(args, seed: int) -> int:
    models_dir = Path(args.models)
    algo = args.algo
    models = {}
    for target in OVR_ORDER:
        path = models_dir / f"{target}_{algo}.json"
        if not path.is_file():
            raise NoModel(f"missing model {path}; run `semverml train`")
        models[target] = load_model(path)
    store = load_store(args.store)
    usable = [r for r in store.releases if not r.skipped and r.version]
    if args.since is not None:
        usable = [r for r in usable if r.raw_version == args.since
                  or str(r.version) == args.since]
        if not usable:
            raise NoPriorRelease(f"no release {args.since!r} in the store")
    if not usable:
        raise NoPriorRelease("store has no usable releases")
    base = max(usable, key=lambda r: (r.ts, r.version._key()))
    worktree = Path(args.repo)
    if not worktree.exists():
        raise InputError(f"working tree {worktree} does not exist")
    commits = [c for c in store.commits if c.ts > base.ts]
    end_ts = max((c.ts for c in commits), default=base.ts)
    pseudo = ReleaseInterval(
        package=store.package, version=base.version, publish_time=end_ts,
        label=ReleaseType.PATCH,  # placeholder; prediction ignores labels
        commits=commits, tree_before=base.tree, tree_after=str(worktree),
        prev_version=base.version, prev_publish_time=base.ts)
    fx = FeatureExtractor(store)
    counts = fx.change_counts(pseudo)
    fv = fx.vector(pseudo)
    for w in fx.warnings:
        print(f"warning: {w}", file=sys.stderr)
    row = fv.as_row()
    scores, suggestion, tied = ovr_predict(models, row)
    print(f"base release: {base.raw_version} at {format_ts(base.ts)}")
    print(f"commits since base: {len(commits)}")
    if counts.is_zero() and all(
            fv.features[n] == 0 for n in
            ("AJF", "MJF", "DJF", "ANJF", "DNJF", "MNJF")):
        print("warning: working tree shows no change relative to the "
              "base release", file=sys.stderr)
    for target in OVR_ORDER:
        print(f"score {target}: {scores[target]:.4f}")
    flag = " (tie, highest precedence wins)" if tied else ""
    print(f"suggested release type: {suggestion}{flag}")
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "label": cmd_label,
    "extract": cmd_extract,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
    "predict": cmd_predict,
}

_CONFIG_KEYS = ("store", "dataset", "models", "reports", "algo", "target",
                "dimension", "mode", "folds", "repo", "registry", "events",
                "since")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _parse_config(args.config) if args.config else {}
        _apply_option_layers(args, config)
        if hasattr(args, "folds") and isinstance(args.folds, str):
            args.folds = int(args.folds)
        if hasattr(args, "mode") and args.mode not in (
                None, "within", "dimension", "cross"):
            raise InputError(f"unknown mode {args.mode!r}")
        seed = _resolve_seed(args, config)
        return _COMMANDS[args.command](args, seed)
    except (InputError, SingleClassInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal failure
        print(f"internal error: {exc.__class__.__name__}: {exc}",
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
