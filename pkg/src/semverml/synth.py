"""Synthetic package corpora with planted release-type signal.

The generator maintains an evolving JavaScript source tree per package and
replays a release history through the real pipeline surface: snapshot
directories, a commit log, registry metadata, and an activity export, all
ingested into a canonical store. Labels follow a configurable mix
(defaults near 10/30/60 for major/minor/patch), and the structural signal
is planted through the edits themselves:

- major releases delete methods and file-scope variables (a mixture: some
  majors are deletion-heavy on functions, others on globals);
- minor releases add new functions;
- patch releases mostly rework existing function bodies.

Background churn (small adds/deletes, comment edits, dependency bumps,
non-JS edits, uncorrelated commit messages and activity events) keeps the
problem from being trivially separable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .mining import format_ts, ingest_repo

_WORDS = (
    "update", "cleanup", "refactor", "docs", "tweak", "adjust", "improve",
    "rework", "simplify", "internal", "build", "chore", "tests", "lint",
    "fix", "bug", "issue", "patch", "breaking", "major",
)

_AUTHORS = ("ana@example.com", "bo@example.com", "cy@example.com",
            "dee@example.com", "eli@example.com")

_EPOCH = datetime(2019, 1, 1, tzinfo=timezone.utc)


@dataclass
class _FnDef:
    name: str
    body: list[str]
    params: list[str] = field(default_factory=lambda: ["input"])


@dataclass
class _ModuleState:
    tag: str
    functions: list[_FnDef] = field(default_factory=list)
    globals_: list[tuple[str, int]] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)


def _new_body(rng: np.random.Generator) -> list[str]:
    k1 = int(rng.integers(1, 9))
    k2 = int(rng.integers(1, 9))
    choice = int(rng.integers(0, 5))
    if choice == 0:
        return [f"const base = input + {k1};", f"return base * {k2};"]
    if choice == 1:
        return [f"if (input > {k1}) {{ return input - {k2}; }}",
                f"return {k1};"]
    if choice == 2:
        return [f"let acc = {k1};",
                f"for (let i = 0; i < input; i++) {{ acc += i % {k2}; }}",
                "return acc;"]
    if choice == 3:
        return [f"return input ? input + {k1} : {k2};"]
    return [f"const scaled = input * {k1};",
            f"if (scaled > {k2}) {{ return scaled; }}",
            "return 0;"]


class _PackageState:
    def __init__(self, name: str, rng: np.random.Generator):
        self.name = name
        self.rng = rng
        self.fn_counter = 0
        self.gv_counter = 0
        self.modules = {
            "lib/core.js": _ModuleState("core"),
            "lib/util.js": _ModuleState("util"),
        }
        self.deps = {"left-pad": "^1.0.0", "lodash": "^4.17.0",
                     "chalk": "^2.0.0"}
        self.readme_rev = 0
        for mod in self.modules.values():
            for _ in range(20):
                self.add_function(mod)
            for _ in range(8):
                self.add_global(mod)
            mod.comments.append(f"module {mod.tag} helpers")

    def total_functions(self) -> int:
        return sum(len(m.functions) for m in self.modules.values())

    def total_globals(self) -> int:
        return sum(len(m.globals_) for m in self.modules.values())

    def pick_module(self) -> _ModuleState:
        keys = sorted(self.modules)
        return self.modules[keys[int(self.rng.integers(0, len(keys)))]]

    def add_function(self, mod: _ModuleState | None = None):
        mod = mod or self.pick_module()
        self.fn_counter += 1
        name = f"{mod.tag}Op{self.fn_counter}"
        mod.functions.append(_FnDef(name=name, body=_new_body(self.rng)))

    def delete_function(self) -> bool:
        pools = [m for m in self.modules.values() if len(m.functions) > 4]
        if not pools:
            return False
        mod = pools[int(self.rng.integers(0, len(pools)))]
        idx = int(self.rng.integers(0, len(mod.functions)))
        mod.functions.pop(idx)
        return True

    def modify_function(self):
        mods = [m for m in self.modules.values() if m.functions]
        if not mods:
            return
        mod = mods[int(self.rng.integers(0, len(mods)))]
        idx = int(self.rng.integers(0, len(mod.functions)))
        mod.functions[idx].body = _new_body(self.rng)

    def _pick_function(self) -> _FnDef | None:
        mods = [m for m in self.modules.values() if m.functions]
        if not mods:
            return None
        mod = mods[int(self.rng.integers(0, len(mods)))]
        return mod.functions[int(self.rng.integers(0, len(mod.functions)))]

    def add_param(self):
        fn = self._pick_function()
        if fn is not None and len(fn.params) < 4:
            fn.params.append(f"opt{len(fn.params)}")

    def remove_param(self):
        candidates = [f for m in self.modules.values()
                      for f in m.functions if len(f.params) > 1]
        if candidates:
            candidates[int(self.rng.integers(0, len(candidates)))].params.pop()

    def delete_comment(self):
        mods = [m for m in self.modules.values() if m.comments]
        if mods:
            mod = mods[int(self.rng.integers(0, len(mods)))]
            mod.comments.pop(int(self.rng.integers(0, len(mod.comments))))

    def add_comment(self):
        mod = self.pick_module()
        mod.comments.append(f"usage {int(self.rng.integers(0, 10000))}")

    def add_global(self, mod: _ModuleState | None = None):
        mod = mod or self.pick_module()
        self.gv_counter += 1
        mod.globals_.append((f"{mod.tag.upper()}_K{self.gv_counter}",
                             int(self.rng.integers(1, 100))))

    def delete_global(self) -> bool:
        pools = [m for m in self.modules.values() if len(m.globals_) > 2]
        if not pools:
            return False
        mod = pools[int(self.rng.integers(0, len(pools)))]
        mod.globals_.pop(int(self.rng.integers(0, len(mod.globals_))))
        return True

    def touch_comment(self):
        mod = self.pick_module()
        if mod.comments and self.rng.random() < 0.5:
            i = int(self.rng.integers(0, len(mod.comments)))
            mod.comments[i] = f"note {int(self.rng.integers(0, 10000))}"
        else:
            mod.comments.append(f"todo {int(self.rng.integers(0, 10000))}")

    def bump_dependency(self):
        names = sorted(self.deps)
        name = names[int(self.rng.integers(0, len(names)))]
        self.deps[name] = f"^{int(self.rng.integers(1, 9))}." \
                          f"{int(self.rng.integers(0, 20))}.0"

    def render(self) -> dict[str, str]:
        files: dict[str, str] = {}
        for rel in sorted(self.modules):
            mod = self.modules[rel]
            parts = []
            for i, comment in enumerate(mod.comments):
                parts.append(f"// {comment}")
            for name, value in mod.globals_:
                parts.append(f"const {name} = {value};")
            parts.append("")
            for fn in mod.functions:
                body = "\n".join(f"  {line}" for line in fn.body)
                sig = ", ".join(fn.params)
                parts.append(f"function {fn.name}({sig}) {{\n{body}\n}}\n")
            files[rel] = "\n".join(parts)
        files["package.json"] = json.dumps(
            {"name": self.name, "dependencies": dict(sorted(self.deps.items()))},
            indent=2) + "\n"
        files["README.md"] = f"# {self.name}\n\nrevision {self.readme_rev}\n"
        return files


def _apply_label_edits(state: _PackageState, label: str,
                       rng: np.random.Generator):
    suppress_adds = False
    if label == "major":
        if rng.random() < 0.5:  # arm A: purge functions, add nothing back
            for _ in range(3 + int(rng.poisson(2))):
                state.delete_function()
            for _ in range(int(rng.poisson(0.5))):
                state.delete_global()
            suppress_adds = True
        else:                   # arm B: purge file-scope variables
            for _ in range(3 + int(rng.poisson(1))):
                state.delete_global()
            for _ in range(int(rng.poisson(0.8))):
                state.delete_function()
        # weak side effects of breaking work
        for _ in range(int(rng.poisson(0.8))):
            state.remove_param()
    elif label == "minor":
        for _ in range(3 + int(rng.poisson(2))):
            state.add_function()
        # weak side effects of feature work
        for _ in range(int(rng.poisson(0.8))):
            state.add_param()
    else:  # patch
        roll = rng.random()
        if roll < 0.10:
            # vendoring purge: mechanical mass deletion, no API change
            for _ in range(8 + int(rng.poisson(3))):
                state.delete_function()
            for _ in range(4 + int(rng.poisson(2))):
                state.delete_global()
            suppress_adds = True
        elif roll < 0.25:
            # dead-code cleanup: a few unpaired deletions
            for _ in range(1 + int(rng.poisson(1))):
                state.delete_function()
            suppress_adds = True
        elif roll < 0.35:
            # intake of generated/vendored code: mass unpaired additions
            for _ in range(7 + int(rng.poisson(3))):
                state.add_function()
        elif roll < 0.60:
            # rewrite burst: bodies swapped, delete+add pairs in the diff
            for _ in range(3 + int(rng.poisson(2))):
                state.modify_function()
        for _ in range(1 + int(rng.poisson(1))):
            state.modify_function()

    # label-independent paired refactor of file-scope variables
    if rng.random() < 0.08:
        paired = 2 + int(rng.poisson(1))
        for _ in range(paired):
            state.delete_global()
        for _ in range(paired):
            state.add_global()

    # background churn, independent of the label
    if not suppress_adds and rng.random() < 0.45:
        for _ in range(int(rng.poisson(0.8))):
            state.add_function()
    if rng.random() < 0.3:
        for _ in range(int(rng.poisson(0.5))):
            state.delete_function()
    if rng.random() < 0.25:
        for _ in range(int(rng.poisson(0.7))):
            state.delete_global()
    if rng.random() < 0.5:
        state.modify_function()
    if rng.random() < 0.35:
        state.touch_comment()
    if rng.random() < 0.2:
        state.add_param()
    if rng.random() < 0.15:
        state.remove_param()
    if rng.random() < 0.15:
        state.delete_comment()
    if rng.random() < 0.3:
        state.bump_dependency()
    if rng.random() < 0.25:
        state.readme_rev += 1
    if rng.random() < 0.25:
        state.add_global()

    # keep deletion pools from draining or growing without bound
    while state.total_functions() < 16:
        state.add_function()
    trimmed = 0
    while state.total_functions() > 80 and trimmed < 3:
        state.delete_function()
        trimmed += 1
    while state.total_globals() < 5:
        state.add_global()


def _commit_message(rng: np.random.Generator) -> str:
    n = 3 + int(rng.integers(0, 6))
    words = [str(_WORDS[int(rng.integers(0, len(_WORDS)))]) for _ in range(n)]
    return " ".join(words)


def generate_package(root, name: str, n_releases: int = 150,
                     seed: int = 0, label_mix=(0.10, 0.30, 0.60),
                     with_events: bool = True,
                     mislabel_rate: float = 0.0,
                     trailing_commits: int = 0) -> Path:
    """Generate one package and ingest it; returns the store directory.

    Layout under ``root/name``: ``trees/<version>/`` snapshots,
    ``commits.jsonl``, ``registry.json``, ``events.jsonl``, and the
    canonical ``store/`` produced by ingestion. *trailing_commits* adds
    unreleased work after the last release, which the ``predict`` command
    can classify.
    """
    rng = np.random.default_rng(np.random.SeedSequence(
        [seed, int.from_bytes(name.encode(), "little") % (2 ** 32)]))
    base = Path(root) / name
    trees = base / "trees"
    state = _PackageState(name, rng)

    version = [1, 0, 0]
    now = _EPOCH + timedelta(days=float(rng.uniform(0, 30)))
    releases = []
    commits = []
    events = []
    commit_counter = 0

    def write_snapshot(ver: str):
        snap = trees / ver
        for rel, content in state.render().items():
            path = snap / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(content, encoding="utf-8")
        return snap

    def emit_commits(lo: datetime, hi: datetime, touched_manifest: bool):
        nonlocal commit_counter
        n = 1 + int(rng.poisson(3))
        offsets = np.sort(rng.uniform(0.02, 0.98, size=n))
        span = (hi - lo).total_seconds()
        for j, off in enumerate(offsets):
            commit_counter += 1
            ts = lo + timedelta(seconds=float(off) * span)
            files = [{"path": "lib/core.js", "status": "modified"}]
            if rng.random() < 0.4:
                files.append({"path": "lib/util.js", "status": "modified"})
            if touched_manifest and j == n - 1:
                files.append({"path": "package.json", "status": "modified"})
            commits.append({
                "id": f"{commit_counter:040x}",
                "author_id": str(_AUTHORS[int(rng.integers(0, len(_AUTHORS)))]),
                "ts": format_ts(ts),
                "msg": _commit_message(rng),
                "files": files,
            })

    def emit_events(lo: datetime, hi: datetime):
        span = (hi - lo).total_seconds()
        for kind in ("issue_opened", "issue_closed", "pr_opened", "pr_closed"):
            for _ in range(int(rng.poisson(1.2))):
                ts = lo + timedelta(seconds=float(rng.uniform(0.01, 0.99)) * span)
                events.append({"kind": kind, "ts": format_ts(ts),
                               "ref_id": f"{kind}-{len(events)}"})

    ver = ".".join(map(str, version))
    write_snapshot(ver)
    releases.append({"version": ver, "ts": format_ts(now),
                     "tree": str((trees / ver).resolve())})

    labels = ("major", "minor", "patch")
    mix = np.asarray(label_mix, dtype=float)
    mix = mix / mix.sum()
    for _ in range(n_releases - 1):
        label = str(labels[int(rng.choice(3, p=mix))])
        deps_before = dict(state.deps)
        _apply_label_edits(state, label, rng)
        touched_manifest = state.deps != deps_before
        tagged = label
        if rng.random() < mislabel_rate:  # developers sometimes tag wrong
            others = [l for l in labels if l != label]
            tagged = str(others[int(rng.integers(0, 2))])
        if tagged == "major":
            version = [version[0] + 1, 0, 0]
        elif tagged == "minor":
            version = [version[0], version[1] + 1, 0]
        else:
            version = [version[0], version[1], version[2] + 1]
        prev_now = now
        now = now + timedelta(days=float(rng.uniform(0.5, 18.0)))
        emit_commits(prev_now, now, touched_manifest)
        if with_events:
            emit_events(prev_now, now)
        ver = ".".join(map(str, version))
        write_snapshot(ver)
        releases.append({"version": ver, "ts": format_ts(now),
                         "tree": str((trees / ver).resolve())})

    if trailing_commits > 0:
        horizon = now + timedelta(days=float(rng.uniform(2.0, 8.0)))
        emit_commits(now, horizon, False)

    base.mkdir(parents=True, exist_ok=True)
    commits_path = base / "commits.jsonl"
    with commits_path.open("w", encoding="utf-8") as fh:
        for c in commits:
            fh.write(json.dumps(c, separators=(",", ":")) + "\n")
    registry_path = base / "registry.json"
    registry_path.write_text(json.dumps(
        {"package": name, "releases": releases}, indent=2) + "\n",
        encoding="utf-8")
    events_path = None
    if with_events:
        events_path = base / "events.jsonl"
        with events_path.open("w", encoding="utf-8") as fh:
            for e in events:
                fh.write(json.dumps(e, separators=(",", ":")) + "\n")
    return ingest_repo(commits_path, registry_path, base / "store",
                       events_path=events_path)


def generate_corpus(root, n_packages: int = 4, n_releases: int = 150,
                    seed: int = 0, label_mix=(0.10, 0.30, 0.60),
                    mislabel_rate: float = 0.0) -> dict[str, Path]:
    """Generate several packages sharing one generating process."""
    stores = {}
    for i in range(n_packages):
        name = f"synthpkg{i}"
        stores[name] = generate_package(root, name, n_releases=n_releases,
                                        seed=seed + i, label_mix=label_mix,
                                        mislabel_rate=mislabel_rate)
    return stores
