"""Repository ingestion, release timelines, and non-structural features.

Ingestion re-encodes a git clone (or a pre-exported commit log) plus
registry release metadata into a canonical on-disk store, so everything
downstream runs hermetically and deterministically:

- ``commits.jsonl``  one object per line:
  ``{"id", "author_id", "ts", "msg", "files": [{"path", "status"}]}``
  with ``ts`` ISO-8601 UTC ending in ``Z`` and ``status`` one of
  ``added | modified | deleted | renamed``.
- ``releases.json``  ``{"package", "releases": [{"version", "ts", "tree"}]}``
  where ``tree`` is a directory or archive with that release's source.
  Entries that cannot be used carry ``"skipped": <reason>``.
- ``events.jsonl``   ``{"kind", "ts", "ref_id"}`` with kind one of
  ``issue_opened | issue_closed | pr_opened | pr_closed`` (optional file).
- ``ingest.log``     human-readable notes from ingestion (ties, skips).

Only first-parent (mainline) history is scanned. Author identity is the
lowercased author email when present, else the author name.
"""

from __future__ import annotations

import json
import re
import subprocess
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import semver
from .errors import MalformedMetadata, MissingRepo
from .semver import ReleaseType, VersionNumber

FILE_STATUSES = ("added", "modified", "deleted", "renamed")
EVENT_KINDS = ("issue_opened", "issue_closed", "pr_opened", "pr_closed")

MANIFEST_PATH = "package.json"


def parse_ts(text: str) -> datetime:
    """Parse an ISO-8601 timestamp into an aware UTC datetime."""
    t = text.strip()
    if t.endswith("Z"):
        t = t[:-1] + "+00:00"
    dt = datetime.fromisoformat(t)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_ts(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


@dataclass(frozen=True)
class FileChange:
    path: str
    status: str


@dataclass
class CommitRecord:
    id: str
    author_id: str
    ts: datetime
    msg: str
    files: list[FileChange] = field(default_factory=list)


@dataclass
class ReleaseRecord:
    version: VersionNumber | None
    raw_version: str
    ts: datetime
    tree: str
    skipped: str | None = None  # reason, when unusable


@dataclass
class ActivityEvent:
    kind: str
    ts: datetime
    ref_id: str


@dataclass
class ReleaseStore:
    package: str
    commits: list[CommitRecord]
    releases: list[ReleaseRecord]
    events: list[ActivityEvent] | None  # None: no events export supplied
    root: Path | None = None


@dataclass
class ReleaseInterval:
    """One labeled release plus the commit window attributed to it."""

    package: str
    version: VersionNumber
    publish_time: datetime
    label: str
    commits: list[CommitRecord]
    tree_before: str
    tree_after: str
    prev_version: VersionNumber
    prev_publish_time: datetime

    @property
    def release_id(self) -> str:
        return f"{self.package}@{self.version}"


@dataclass
class Timeline:
    package: str
    intervals: list[ReleaseInterval]
    dropped: list[tuple[str, str]]  # (version text, reason)
    warnings: list[str]

    def label_counts(self) -> dict[str, int]:
        counts = {ReleaseType.MAJOR: 0, ReleaseType.MINOR: 0, ReleaseType.PATCH: 0}
        for iv in self.intervals:
            counts[iv.label] += 1
        return counts


# ---------------------------------------------------------------------------
# commit extraction

_GIT_STATUS = {"A": "added", "M": "modified", "D": "deleted",
               "R": "renamed", "C": "added", "T": "modified"}


def _commits_from_git(repo: Path) -> list[CommitRecord]:
    fmt = "%x1e%H%x1f%ae%x1f%an%x1f%cI%x1f%B%x1f"
    try:
        out = subprocess.run(
            ["git", "-C", str(repo), "log", "--first-parent", "--no-renames",
             "--name-status", f"--pretty=format:{fmt}"],
            capture_output=True, text=True, check=True,
        ).stdout
    except (OSError, subprocess.CalledProcessError) as exc:
        raise MissingRepo(f"git log failed for {repo}: {exc}") from exc
    commits = []
    for chunk in out.split("\x1e"):
        if not chunk.strip():
            continue
        parts = chunk.split("\x1f")
        if len(parts) < 6:
            continue
        sha, email, name, date, body, tail = parts[0], parts[1], parts[2], \
            parts[3], parts[4], parts[5]
        files = []
        for line in tail.splitlines():
            line = line.strip()
            if not line or "\t" not in line:
                continue
            code, rest = line.split("\t", 1)
            status = _GIT_STATUS.get(code[:1])
            if status is None:
                continue
            path = rest.split("\t")[-1]  # renames/copies list two paths
            files.append(FileChange(path=path, status=status))
        author = email.strip().lower() or name.strip()
        commits.append(CommitRecord(
            id=sha.strip(), author_id=author, ts=parse_ts(date),
            msg=body.rstrip("\n"), files=files))
    return commits


def _commits_from_jsonl(path: Path) -> list[CommitRecord]:
    commits = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise MissingRepo(f"cannot read commit log {path}: {exc}") from exc
    for ln, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            files = [FileChange(path=str(f["path"]), status=str(f["status"]))
                     for f in obj.get("files", [])]
            commits.append(CommitRecord(
                id=str(obj["id"]), author_id=str(obj["author_id"]),
                ts=parse_ts(str(obj["ts"])), msg=str(obj.get("msg", "")),
                files=files))
        except (KeyError, ValueError, TypeError) as exc:
            raise MissingRepo(
                f"bad commit record at {path}:{ln}: {exc}") from exc
    return commits


def extract_commits(repo_path) -> list[CommitRecord]:
    """Commits from a git clone or an already-exported JSONL log."""
    p = Path(repo_path)
    if p.is_dir() and (p / ".git").exists():
        commits = _commits_from_git(p)
    elif p.is_dir() and (p / "commits.jsonl").is_file():
        commits = _commits_from_jsonl(p / "commits.jsonl")
    elif p.is_file():
        commits = _commits_from_jsonl(p)
    else:
        raise MissingRepo(f"no repository or commit log at {repo_path}")
    commits.sort(key=lambda c: (c.ts, c.id))
    return commits


# ---------------------------------------------------------------------------
# ingestion

def _load_registry(path: Path):
    try:
        meta = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise MalformedMetadata(f"cannot read registry metadata {path}: {exc}") \
            from exc
    if not isinstance(meta, dict) or "releases" not in meta:
        raise MalformedMetadata(f"{path}: expected an object with 'releases'")
    package = str(meta.get("package", path.stem))
    entries = meta["releases"]
    if not isinstance(entries, list):
        raise MalformedMetadata(f"{path}: 'releases' must be a list")
    releases = []
    base = path.parent
    for k, entry in enumerate(entries):
        try:
            raw_version = str(entry["version"])
            ts = parse_ts(str(entry["ts"]))
            tree = str(entry.get("tree", ""))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedMetadata(f"{path}: bad release entry {k}: {exc}") \
                from exc
        skipped = None
        version = None
        try:
            version = semver.parse_version(raw_version)
        except Exception:
            skipped = "malformed version"
        tree_path = tree
        if tree and not Path(tree).is_absolute():
            tree_path = str((base / tree).resolve())
        if skipped is None and (not tree_path or not Path(tree_path).exists()):
            skipped = "snapshot missing"
        releases.append(ReleaseRecord(
            version=version, raw_version=raw_version, ts=ts,
            tree=tree_path, skipped=skipped))
    return package, releases


def _load_events(path: Path) -> list[ActivityEvent]:
    events = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise MalformedMetadata(f"cannot read events {path}: {exc}") from exc
    for ln, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            kind = str(obj["kind"])
            if kind not in EVENT_KINDS:
                raise ValueError(f"unknown kind {kind!r}")
            events.append(ActivityEvent(
                kind=kind, ts=parse_ts(str(obj["ts"])),
                ref_id=str(obj.get("ref_id", ""))))
        except (KeyError, ValueError, TypeError) as exc:
            raise MalformedMetadata(f"bad event at {path}:{ln}: {exc}") from exc
    return events


def _release_sort_key(r: ReleaseRecord):
    vkey = r.version._key() if r.version is not None else (-1, -1, -1, False, "")
    return (r.ts, vkey, r.raw_version)


def ingest_repo(repo_path, registry_metadata_path, out_dir,
                events_path=None) -> Path:
    """Build the canonical store under *out_dir*; returns its path.

    Deterministic given identical inputs: records are sorted, timestamps
    normalized to UTC, and files written with fixed JSON formatting.
    """
    commits = extract_commits(repo_path)
    package, releases = _load_registry(Path(registry_metadata_path))
    events = _load_events(Path(events_path)) if events_path else None

    log: list[str] = []
    releases.sort(key=_release_sort_key)
    for a, b in zip(releases, releases[1:]):
        if a.ts == b.ts:
            log.append(f"timestamp tie between {a.raw_version} and "
                       f"{b.raw_version}; ordered by version precedence")
    for r in releases:
        if r.skipped:
            log.append(f"release {r.raw_version} skipped: {r.skipped}")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "commits.jsonl").open("w", encoding="utf-8") as fh:
        for c in commits:
            rec = {
                "id": c.id,
                "author_id": c.author_id,
                "ts": format_ts(c.ts),
                "msg": c.msg,
                "files": [{"path": f.path, "status": f.status}
                          for f in sorted(c.files,
                                          key=lambda f: (f.path, f.status))],
            }
            fh.write(json.dumps(rec, ensure_ascii=False,
                                separators=(",", ":")) + "\n")
    payload = {
        "package": package,
        "releases": [
            {
                "version": r.raw_version,
                "ts": format_ts(r.ts),
                "tree": r.tree,
                **({"skipped": r.skipped} if r.skipped else {}),
            }
            for r in releases
        ],
    }
    (out / "releases.json").write_text(
        json.dumps(payload, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8")
    if events is not None:
        events.sort(key=lambda e: (e.ts, e.kind, e.ref_id))
        with (out / "events.jsonl").open("w", encoding="utf-8") as fh:
            for e in events:
                fh.write(json.dumps(
                    {"kind": e.kind, "ts": format_ts(e.ts), "ref_id": e.ref_id},
                    ensure_ascii=False, separators=(",", ":")) + "\n")
    (out / "ingest.log").write_text(
        "".join(line + "\n" for line in log), encoding="utf-8")
    return out


def load_store(store_dir) -> ReleaseStore:
    root = Path(store_dir)
    commits_file = root / "commits.jsonl"
    releases_file = root / "releases.json"
    if not commits_file.is_file() or not releases_file.is_file():
        raise MissingRepo(f"{store_dir} is not a canonical store")
    commits = _commits_from_jsonl(commits_file)
    try:
        payload = json.loads(releases_file.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise MalformedMetadata(f"{releases_file}: {exc}") from exc
    releases = []
    for entry in payload.get("releases", []):
        raw = str(entry["version"])
        version = None
        try:
            version = semver.parse_version(raw)
        except Exception:
            pass
        releases.append(ReleaseRecord(
            version=version, raw_version=raw, ts=parse_ts(entry["ts"]),
            tree=str(entry.get("tree", "")),
            skipped=entry.get("skipped")))
    events = None
    if (root / "events.jsonl").is_file():
        events = _load_events(root / "events.jsonl")
    return ReleaseStore(package=str(payload.get("package", root.name)),
                        commits=commits, releases=releases, events=events,
                        root=root)


# ---------------------------------------------------------------------------
# timeline

def build_release_timeline(store: ReleaseStore) -> Timeline:
    """Link each labeled release to its commit window.

    Releases sort by publish time (version precedence as tie-break). The
    first usable release has no predecessor and is excluded; backports and
    no-change re-tags are dropped, and the next release's window then spans
    from the last kept release, so windows stay disjoint and cover the
    mainline. A commit at exactly the previous publish instant belongs to
    the previous release (exclusive lower bound, inclusive upper).
    """
    from .errors import EmptyTimeline

    warnings: list[str] = []
    dropped: list[tuple[str, str]] = []
    usable = [r for r in store.releases if not r.skipped and r.version]
    usable.sort(key=_release_sort_key)
    for a, b in zip(usable, usable[1:]):
        if a.ts == b.ts:
            warnings.append(f"timestamp tie: {a.raw_version} / {b.raw_version}")
    if len(usable) < 2:
        raise EmptyTimeline(
            f"{store.package}: need at least 2 usable releases, "
            f"have {len(usable)}")

    commit_ts = [c.ts for c in store.commits]

    def window(lo, hi):
        from bisect import bisect_right
        return store.commits[bisect_right(commit_ts, lo):
                             bisect_right(commit_ts, hi)]

    intervals: list[ReleaseInterval] = []
    prev = usable[0]
    for rel in usable[1:]:
        label = semver.label_transition(prev.version, rel.version)
        if label == ReleaseType.BACKPORT or label == ReleaseType.NO_CHANGE:
            dropped.append((rel.raw_version, label))
            continue
        intervals.append(ReleaseInterval(
            package=store.package,
            version=rel.version,
            publish_time=rel.ts,
            label=label,
            commits=window(prev.ts, rel.ts),
            tree_before=prev.tree,
            tree_after=rel.tree,
            prev_version=prev.version,
            prev_publish_time=prev.ts,
        ))
        prev = rel
    return Timeline(package=store.package, intervals=intervals,
                    dropped=dropped, warnings=warnings)


# ---------------------------------------------------------------------------
# dependency features

@dataclass
class DependencyFeatures:
    TCPJ: int
    PA: int
    PD: int
    PU: int


def read_manifest(snapshot) -> tuple[dict[str, str], str | None]:
    """Dependency name -> constraint from a snapshot's package.json.

    A missing manifest is an empty dict; a malformed one is treated as
    empty and reported in the second slot so extraction never aborts.
    """
    from .errors import UnreadableFile

    try:
        raw = snapshot.read(MANIFEST_PATH)
    except UnreadableFile:
        return {}, None
    try:
        obj = json.loads(raw.decode("utf-8", "replace"))
        if not isinstance(obj, dict):
            raise ValueError("manifest is not an object")
    except ValueError as exc:
        return {}, f"malformed {MANIFEST_PATH}: {exc}"
    deps: dict[str, str] = {}
    for section in ("devDependencies", "dependencies"):
        sec = obj.get(section)
        if isinstance(sec, dict):
            for name, constraint in sec.items():
                deps[str(name)] = str(constraint)
    return deps, None


def dependency_features(interval: ReleaseInterval,
                        manifest_before: dict[str, str] | None,
                        manifest_after: dict[str, str] | None,
                        ) -> DependencyFeatures:
    before = manifest_before or {}
    after = manifest_after or {}
    tcpj = sum(1 for c in interval.commits
               if any(f.path == MANIFEST_PATH for f in c.files))
    added = after.keys() - before.keys()
    deleted = before.keys() - after.keys()
    updated = {n for n in after.keys() & before.keys()
               if after[n] != before[n]}
    return DependencyFeatures(TCPJ=tcpj, PA=len(added), PD=len(deleted),
                              PU=len(updated))


# ---------------------------------------------------------------------------
# development features

@dataclass
class DevelopmentFeatures:
    TCM: int
    TAU: int
    POI: int
    PCI: int
    PCPR: int
    POPR: int


def development_features(interval: ReleaseInterval,
                         events: list[ActivityEvent] | None,
                         ) -> tuple[DevelopmentFeatures, str | None]:
    """Commit/author totals plus issue and PR activity in the window.

    Events are filtered with the same boundary rule as commits. When no
    events export exists the four activity counters degrade to zero and a
    warning is returned.
    """
    tcm = len(interval.commits)
    tau = len({c.author_id for c in interval.commits})
    warning = None
    kinds = {k: 0 for k in EVENT_KINDS}
    if events is None:
        warning = "no events export; issue/PR counters default to 0"
    else:
        lo, hi = interval.prev_publish_time, interval.publish_time
        for e in events:
            if lo < e.ts <= hi:
                kinds[e.kind] += 1
    return DevelopmentFeatures(
        TCM=tcm, TAU=tau, POI=kinds["issue_opened"], PCI=kinds["issue_closed"],
        PCPR=kinds["pr_closed"], POPR=kinds["pr_opened"]), warning


# ---------------------------------------------------------------------------
# textual features

@dataclass
class TextualFeatures:
    NBF: int
    KWM: int
    KWP: int
    KWB: int
    AML: float


_BUG_RE = re.compile(r"\b(?:bug|fix|defect|error|issue)(?:s|es|ed|ing)?\b")
_MAJOR_RE = re.compile(r"\bmajor(?:s|es|ed|ing)?\b")
_PATCH_RE = re.compile(r"\bpatch(?:s|es|ed|ing)?\b")
_BREAK_RE = re.compile(r"\bbreak(?:s|es|ed|ing|age)?\b")


def textual_features(interval: ReleaseInterval) -> TextualFeatures:
    """Keyword counters over lowercased commit messages, plus mean length.

    Keywords match at word boundaries with common suffix variants
    (fix/fixed/fixes/fixing, break/breaking/breakage, ...). Message length
    is counted in characters; an empty window yields 0.
    """
    nbf = kwm = kwp = kwb = 0
    lengths = []
    for c in interval.commits:
        msg = c.msg.lower()
        lengths.append(len(c.msg))
        if _BUG_RE.search(msg):
            nbf += 1
        if _MAJOR_RE.search(msg):
            kwm += 1
        if _PATCH_RE.search(msg):
            kwp += 1
        if _BREAK_RE.search(msg):
            kwb += 1
    aml = sum(lengths) / len(lengths) if lengths else 0.0
    return TextualFeatures(NBF=nbf, KWM=kwm, KWP=kwp, KWB=kwb, AML=aml)


def time_feature(interval: ReleaseInterval) -> float:
    """Days between the previous release and this one (fractional, >= 0)."""
    delta = interval.publish_time - interval.prev_publish_time
    return max(0.0, delta.total_seconds() / 86400.0)
