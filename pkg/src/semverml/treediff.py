"""Snapshot and AST differencing into fine-grained change-type counters.

Matching between two file trees runs in three deterministic passes:

1. anchor: identical subtrees (same kind, same content fingerprint) are
   matched greedily, largest first, candidates consumed in source order;
2. container: walking the before tree bottom-up, an unmatched node with
   matched descendants is paired with the unmatched same-kind node whose
   descendant-match dice coefficient is at least 0.5, preferring higher
   dice, then smaller span distance, then source order. The two file roots
   are always paired.
3. leaf recovery: for every matched pair of nodes, their remaining
   childless children are paired up per kind in source order. This is what
   lets an edited comment or a tweaked one-line statement register as a
   modification instead of a delete plus an add.

The mapping is injective both ways and only ever pairs nodes of the same
kind. Release-level counters are sums over file pairs, so aggregation is
order-independent.
"""

from __future__ import annotations

import hashlib
import tarfile
import zipfile
from dataclasses import dataclass, fields
from pathlib import Path, PurePosixPath

from .errors import UnreadableFile
from .jsparse import (
    COMMENT,
    JsAst,
    JsNode,
    PARAM,
    STATEMENT,
    VAR_DECL,
    parse_js,
)


# ---------------------------------------------------------------------------
# release snapshots: plain directories or archives

class Snapshot:
    """Read-only view of one release's source tree."""

    def paths(self) -> list[str]:
        raise NotImplementedError

    def read(self, relpath: str) -> bytes:
        raise NotImplementedError

    def read_text(self, relpath: str) -> str:
        return self.read(relpath).decode("utf-8", "replace")

    @staticmethod
    def open(path) -> "Snapshot":
        if path is None:
            return _EmptySnapshot()
        p = Path(path)
        if p.is_dir():
            return _DirSnapshot(p)
        name = p.name.lower()
        if name.endswith(".zip"):
            return _ZipSnapshot(p)
        if name.endswith((".tar", ".tar.gz", ".tgz", ".tar.bz2")):
            return _TarSnapshot(p)
        raise UnreadableFile(f"not a snapshot directory or archive: {path}")


class _EmptySnapshot(Snapshot):
    def paths(self):
        return []

    def read(self, relpath):
        raise UnreadableFile(relpath)


class _DirSnapshot(Snapshot):
    def __init__(self, root: Path):
        self.root = root

    def paths(self):
        out = []
        for p in sorted(self.root.rglob("*")):
            if not p.is_file():
                continue
            rel = p.relative_to(self.root).as_posix()
            if rel.split("/", 1)[0] == ".git":
                continue
            out.append(rel)
        return out

    def read(self, relpath):
        try:
            return (self.root / relpath).read_bytes()
        except OSError as exc:
            raise UnreadableFile(f"{self.root / relpath}: {exc}") from exc


def _strip_common_top(names: list[str]) -> dict[str, str]:
    """Map member name -> relative path, dropping one shared top directory.

    npm release tarballs wrap everything in a ``package/`` directory; the
    wrapper is noise for path-identity across releases.
    """
    cleaned = {}
    tops = set()
    for name in names:
        norm = name.lstrip("./")
        if not norm:
            continue
        cleaned[name] = norm
        tops.add(norm.split("/", 1)[0])
    if len(tops) == 1 and all("/" in v for v in cleaned.values()):
        return {k: v.split("/", 1)[1] for k, v in cleaned.items()}
    return cleaned


class _ZipSnapshot(Snapshot):
    def __init__(self, path: Path):
        self.path = path
        try:
            self.zf = zipfile.ZipFile(path)
        except (OSError, zipfile.BadZipFile) as exc:
            raise UnreadableFile(f"{path}: {exc}") from exc
        members = [i.filename for i in self.zf.infolist() if not i.is_dir()]
        self._map = _strip_common_top(members)
        self._rev = {v: k for k, v in self._map.items()}

    def paths(self):
        return sorted(self._rev)

    def read(self, relpath):
        try:
            return self.zf.read(self._rev[relpath])
        except (KeyError, OSError, zipfile.BadZipFile) as exc:
            raise UnreadableFile(f"{self.path}:{relpath}: {exc}") from exc


class _TarSnapshot(Snapshot):
    def __init__(self, path: Path):
        self.path = path
        try:
            self.tf = tarfile.open(path)
        except (OSError, tarfile.TarError) as exc:
            raise UnreadableFile(f"{path}: {exc}") from exc
        members = [m.name for m in self.tf.getmembers() if m.isfile()]
        self._map = _strip_common_top(members)
        self._rev = {v: k for k, v in self._map.items()}

    def paths(self):
        return sorted(self._rev)

    def read(self, relpath):
        try:
            fh = self.tf.extractfile(self._rev[relpath])
            if fh is None:
                raise UnreadableFile(f"{self.path}:{relpath}")
            return fh.read()
        except (KeyError, OSError, tarfile.TarError) as exc:
            raise UnreadableFile(f"{self.path}:{relpath}: {exc}") from exc


# ---------------------------------------------------------------------------
# change-type counters

@dataclass
class ChangeTypeCounts:
    """The twenty change-type counters extracted from one release diff."""

    AJF: int = 0   # JS files added
    MJF: int = 0   # JS files modified
    DJF: int = 0   # JS files deleted
    ANJF: int = 0  # non-JS files added
    DNJF: int = 0  # non-JS files deleted
    MNJF: int = 0  # non-JS files modified
    ADM: int = 0   # methods added
    DEM: int = 0   # methods deleted
    MOM: int = 0   # methods moved
    MNC: int = 0   # methods renamed
    MPC: int = 0   # method parameter lists changed or grown
    MPD: int = 0   # method parameter lists shrunk
    MLA: int = 0   # statements added inside matched methods
    MLM: int = 0   # statements moved inside methods
    MLD: int = 0   # statements deleted inside matched methods
    GVA: int = 0   # file-scope variables added
    GVD: int = 0   # file-scope variables deleted
    ICC: int = 0   # comments added
    DCC: int = 0   # comments deleted
    MCC: int = 0   # comments modified

    def __add__(self, other: "ChangeTypeCounts") -> "ChangeTypeCounts":
        return ChangeTypeCounts(**{
            f.name: getattr(self, f.name) + getattr(other, f.name)
            for f in fields(self)
        })

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "ChangeTypeCounts":
        return cls(**{f.name: int(d[f.name]) for f in fields(cls)})

    def is_zero(self) -> bool:
        return all(getattr(self, f.name) == 0 for f in fields(self))


# ---------------------------------------------------------------------------
# file-set diff

def _is_js(relpath: str) -> bool:
    return PurePosixPath(relpath).suffix == ".js"


def _content_hash(data: bytes) -> bytes:
    return hashlib.blake2b(data, digest_size=16).digest()


@dataclass
class FileSetDiff:
    counts: ChangeTypeCounts
    pairs_to_diff: list[tuple[str, str | None, str | None]]
    warnings: list[str]


def diff_file_sets(tree_before: Snapshot, tree_after: Snapshot) -> FileSetDiff:
    """Pair the two snapshots' files by relative path.

    Fills the six file-level counters and returns the JS file pairs that
    need tree diffing: modified files plus added/deleted ones (the missing
    side paired with ``None``). A renamed file shows up as one delete and
    one add, since identity is by path. Unreadable files are skipped and
    reported in ``warnings``.
    """
    counts = ChangeTypeCounts()
    warnings: list[str] = []
    before_paths = set(tree_before.paths())
    after_paths = set(tree_after.paths())
    pairs: list[tuple[str, str | None, str | None]] = []

    def safe_read(snap: Snapshot, rel: str) -> bytes | None:
        try:
            return snap.read(rel)
        except UnreadableFile as exc:
            warnings.append(str(exc))
            return None

    for rel in sorted(before_paths | after_paths):
        js = _is_js(rel)
        if rel not in before_paths:
            data = safe_read(tree_after, rel)
            if data is None:
                continue
            if js:
                counts.AJF += 1
                pairs.append((rel, None, data.decode("utf-8", "replace")))
            else:
                counts.ANJF += 1
        elif rel not in after_paths:
            data = safe_read(tree_before, rel)
            if data is None:
                continue
            if js:
                counts.DJF += 1
                pairs.append((rel, data.decode("utf-8", "replace"), None))
            else:
                counts.DNJF += 1
        else:
            b = safe_read(tree_before, rel)
            a = safe_read(tree_after, rel)
            if b is None or a is None:
                continue
            if _content_hash(b) == _content_hash(a):
                continue
            if js:
                counts.MJF += 1
                pairs.append((rel, b.decode("utf-8", "replace"),
                              a.decode("utf-8", "replace")))
            else:
                counts.MNJF += 1
    return FileSetDiff(counts=counts, pairs_to_diff=pairs, warnings=warnings)


# ---------------------------------------------------------------------------
# tree matching

@dataclass
class TreeMapping:
    pairs: dict[JsNode, JsNode]          # before -> after
    reverse: dict[JsNode, JsNode]        # after -> before
    unmatched_before: list[JsNode]
    unmatched_after: list[JsNode]


def _zip_subtrees(b: JsNode, a: JsNode) -> list[tuple[JsNode, JsNode]] | None:
    """Pair up two structurally identical subtrees, or None on mismatch."""
    out = []
    stack = [(b, a)]
    while stack:
        x, y = stack.pop()
        if x.kind != y.kind or len(x.children) != len(y.children):
            return None  # fingerprint collision; refuse the anchor
        out.append((x, y))
        stack.extend(zip(x.children, y.children))
    return out


def _descendant_range(node: JsNode) -> tuple[int, int]:
    return node.index + 1, node.index + node.size


def _dice(b: JsNode, a: JsNode, m_ba: dict) -> float:
    nb = b.size - 1
    na = a.size - 1
    if nb + na == 0:
        return 0.0
    lo, hi = _descendant_range(a)
    common = 0
    stack = list(b.children)
    while stack:
        x = stack.pop()
        y = m_ba.get(x)
        if y is not None and lo <= y.index < hi:
            common += 1
        stack.extend(x.children)
    return 2.0 * common / (nb + na)


def _span_distance(b: JsNode, a: JsNode) -> int:
    return abs(b.span[0] - a.span[0]) + abs(b.span[1] - a.span[1])


def match_trees(before: JsAst | JsNode, after: JsAst | JsNode) -> TreeMapping:
    """Match the two file trees; see the module docstring for the phases."""
    b_root = before.root if isinstance(before, JsAst) else before
    a_root = after.root if isinstance(after, JsAst) else after
    b_nodes = list(b_root.walk())
    a_nodes = list(a_root.walk())
    m_ba: dict[JsNode, JsNode] = {}
    m_ab: dict[JsNode, JsNode] = {}

    def bind(x: JsNode, y: JsNode):
        m_ba[x] = y
        m_ab[y] = x

    # phase 1: anchor identical subtrees, largest first. A parameter's
    # identity is owner-scoped (the text of a short name is not
    # distinctive), so a Param may only seed an anchor toward a parameter
    # of an equally named function; inside larger anchors and in leaf
    # recovery they pair up as usual.
    def _param_gate(b: JsNode, a: JsNode) -> bool:
        if b.kind != PARAM:
            return True
        pb, pa = b.parent, a.parent
        return (pb is not None and pa is not None
                and pb.name is not None and pb.name == pa.name)

    candidates: dict[tuple[str, int], list[JsNode]] = {}
    for a in a_nodes:
        candidates.setdefault((a.kind, a.text_hash), []).append(a)
    for b in sorted(b_nodes, key=lambda n: (-n.size, n.index)):
        if b in m_ba:
            continue
        pool = candidates.get((b.kind, b.text_hash))
        if not pool:
            continue
        for a in pool:
            if a in m_ab or not _param_gate(b, a):
                continue
            zipped = _zip_subtrees(b, a)
            if zipped is None:
                continue
            for x, y in zipped:
                bind(x, y)
            break

    # phase 2: containers by descendant-match dice, before side bottom-up
    if b_root not in m_ba and a_root not in m_ab:
        bind(b_root, a_root)

    def postorder(node: JsNode):
        for child in node.children:
            yield from postorder(child)
        yield node

    open_after = [a for a in a_nodes if a not in m_ab]
    for b in postorder(b_root):
        if b in m_ba or b.size == 1:
            continue
        has_matched_desc = any(
            x in m_ba for x in b.walk() if x is not b)
        if not has_matched_desc:
            continue
        best = None
        best_key = None
        for a in open_after:
            if a in m_ab or a.kind != b.kind:
                continue
            d = _dice(b, a, m_ba)
            if d < 0.5:
                continue
            key = (-d, _span_distance(b, a), a.index)
            if best_key is None or key < best_key:
                best, best_key = a, key
        if best is not None:
            bind(b, best)

    # phase 3: leaf recovery inside matched pairs
    for b in b_nodes:
        a = m_ba.get(b)
        if a is None:
            continue
        loose_b = [c for c in b.children if c.size == 1 and c not in m_ba]
        loose_a = [c for c in a.children if c.size == 1 and c not in m_ab]
        if not loose_b or not loose_a:
            continue
        by_kind: dict[str, list[JsNode]] = {}
        for c in loose_a:
            by_kind.setdefault(c.kind, []).append(c)
        for cb in loose_b:
            pool = by_kind.get(cb.kind)
            if pool:
                bind(cb, pool.pop(0))

    return TreeMapping(
        pairs=m_ba,
        reverse=m_ab,
        unmatched_before=[n for n in b_nodes if n not in m_ba],
        unmatched_after=[n for n in a_nodes if n not in m_ab],
    )


# ---------------------------------------------------------------------------
# change classification

def _parents_matched(b: JsNode, a: JsNode, m_ba: dict) -> bool:
    pb, pa = b.parent, a.parent
    if pb is None and pa is None:
        return True
    return pb is not None and m_ba.get(pb) is pa


def _has_matched_function_ancestor(node: JsNode, matched: dict) -> bool:
    p = node.parent
    while p is not None:
        if p.is_function() and p in matched:
            return True
        p = p.parent
    return False


def _inside_function(node: JsNode) -> bool:
    p = node.parent
    while p is not None:
        if p.is_function():
            return True
        p = p.parent
    return False


def _kind_pos(node: JsNode) -> int:
    """Position among same-kind siblings; parameters do not shift statements."""
    if node.parent is None:
        return 0
    return sum(1 for sib in node.parent.children[:node.sibling_pos]
               if sib.kind == node.kind)


def classify_changes(mapping: TreeMapping, before: JsAst | JsNode,
                     after: JsAst | JsNode) -> ChangeTypeCounts:
    """Turn one file pair's node mapping into change-type counters.

    Method-level rules: unmatched functions are adds/deletes; a matched
    pair counts as renamed when the names differ and as moved when the
    parents are not matched to each other (a renamed-and-moved function
    counts as both). Parameter growth or an equal-length name change is
    MPC, shrinkage is MPD. Statement adds/deletes only count inside
    functions that themselves matched, so a brand-new function contributes
    ADM but not a statement per body line. File-scope variable and comment
    counters follow the same unmatched/matched logic.
    """
    b_root = before.root if isinstance(before, JsAst) else before
    a_root = after.root if isinstance(after, JsAst) else after
    m_ba = mapping.pairs
    m_ab = mapping.reverse
    c = ChangeTypeCounts()

    for a in a_root.walk():
        if a in m_ab:
            continue
        if a.is_function():
            c.ADM += 1
        elif a.kind == STATEMENT and _has_matched_function_ancestor(a, m_ab):
            c.MLA += 1
        elif a.kind == VAR_DECL:
            c.GVA += 1
        elif a.kind == COMMENT:
            c.ICC += 1

    for b in b_root.walk():
        a = m_ba.get(b)
        if a is None:
            if b.is_function():
                c.DEM += 1
            elif b.kind == STATEMENT and _has_matched_function_ancestor(b, m_ba):
                c.MLD += 1
            elif b.kind == VAR_DECL:
                c.GVD += 1
            elif b.kind == COMMENT:
                c.DCC += 1
            continue
        if b.is_function():
            same_parent = _parents_matched(b, a, m_ba)
            if not same_parent:
                c.MOM += 1
            if b.name != a.name:
                c.MNC += 1
            nb, na = len(b.param_names), len(a.param_names)
            if na > nb:
                c.MPC += 1
            elif na < nb:
                c.MPD += 1
            elif b.param_names != a.param_names:
                c.MPC += 1
        elif b.kind == STATEMENT:
            if _inside_function(b) and _inside_function(a):
                if not _parents_matched(b, a, m_ba) \
                        or _kind_pos(b) != _kind_pos(a):
                    c.MLM += 1
        elif b.kind == COMMENT:
            if b.text_hash != a.text_hash:
                c.MCC += 1
    return c


def diff_js_sources(before_src: str | None, after_src: str | None,
                    path: str = "<memory>") -> ChangeTypeCounts:
    """Parse, match, and classify one file pair; missing sides are empty."""
    b_ast = parse_js(before_src or "", path)
    a_ast = parse_js(after_src or "", path)
    mapping = match_trees(b_ast, a_ast)
    return classify_changes(mapping, b_ast, a_ast)


def release_change_counts(tree_before: Snapshot,
                          tree_after: Snapshot) -> tuple[ChangeTypeCounts, list[str]]:
    """All twenty counters for one release transition, plus any warnings."""
    fsd = diff_file_sets(tree_before, tree_after)
    total = fsd.counts
    for rel, b_src, a_src in fsd.pairs_to_diff:
        total = total + diff_js_sources(b_src, a_src, rel)
    return total, fsd.warnings
