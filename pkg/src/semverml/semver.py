"""Version parsing, precedence, and release-transition labeling.

Pure functions throughout; safe to call from concurrent workers.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field

from .errors import MalformedVersion

LESS = -1
EQUAL = 0
GREATER = 1

_VERSION_RE = re.compile(r"^(\d+)\.(\d+)\.(\d+)(?:-(.+))?$")


@functools.total_ordering
@dataclass(frozen=True)
class VersionNumber:
    """A parsed major.minor.patch version with an optional pre-release tag.

    The tag is kept opaque: ``1.2.3-beta`` orders below ``1.2.3``, and two
    tagged versions with the same triple are ordered by tag text so the
    ordering stays total. Tagged releases are normally filtered out before
    labeling, so nothing finer is needed.
    """

    major: int
    minor: int
    patch: int
    prerelease: str | None = None
    raw: str = field(default="", compare=False)

    def _key(self):
        # A present tag sorts below absence of a tag on the same triple.
        return (self.major, self.minor, self.patch,
                self.prerelease is None, self.prerelease or "")

    def __lt__(self, other: "VersionNumber") -> bool:
        return self._key() < other._key()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VersionNumber):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __str__(self) -> str:
        base = f"{self.major}.{self.minor}.{self.patch}"
        return base if self.prerelease is None else f"{base}-{self.prerelease}"


class ReleaseType:
    """Labeling outcomes for a version transition.

    MAJOR / MINOR / PATCH are dataset labels; BACKPORT and NO_CHANGE are
    explicit outcomes so the labeling pass can log and drop them instead of
    erroring out.
    """

    MAJOR = "major"
    MINOR = "minor"
    PATCH = "patch"
    BACKPORT = "backport"
    NO_CHANGE = "no_change"

    LABELS = (MAJOR, MINOR, PATCH)


def parse_version(text: str) -> VersionNumber:
    """Parse ``[v]MAJOR.MINOR.PATCH[-tag]`` into a :class:`VersionNumber`.

    A leading ``v`` prefix (common in git tags) is stripped. Raises
    :class:`MalformedVersion` unless the text has exactly three
    dot-separated unsigned integer components.
    """
    if not text:
        raise MalformedVersion("empty version string")
    stripped = text[1:] if text[0] in "vV" else text
    m = _VERSION_RE.match(stripped.strip())
    if m is None:
        raise MalformedVersion(f"not a MAJOR.MINOR.PATCH version: {text!r}")
    return VersionNumber(
        major=int(m.group(1)),
        minor=int(m.group(2)),
        patch=int(m.group(3)),
        prerelease=m.group(4),
        raw=text,
    )


def compare(a: VersionNumber, b: VersionNumber) -> int:
    """Precedence of *a* relative to *b*: LESS, EQUAL, or GREATER.

    Versions compare by major, then minor, then patch magnitude; a tagged
    version orders below the bare version with the same triple.
    """
    ka, kb = a._key(), b._key()
    if ka < kb:
        return LESS
    if ka > kb:
        return GREATER
    return EQUAL


def label_transition(prev: VersionNumber, nxt: VersionNumber) -> str:
    """Label the transition from *prev* to the date-subsequent release *nxt*.

    Returns one of the :class:`ReleaseType` constants. A release whose
    version precedes its date-predecessor is a BACKPORT; an identical
    version is NO_CHANGE. Otherwise the highest-order component that grew
    decides the label (a same-triple step such as ``1.2.3-beta -> 1.2.3``
    falls through to PATCH).
    """
    order = compare(nxt, prev)
    if order == LESS:
        return ReleaseType.BACKPORT
    if order == EQUAL:
        return ReleaseType.NO_CHANGE
    if nxt.major > prev.major:
        return ReleaseType.MAJOR
    if nxt.minor > prev.minor:
        return ReleaseType.MINOR
    return ReleaseType.PATCH


def bump_major(v: VersionNumber) -> VersionNumber:
    return VersionNumber(v.major + 1, 0, 0)


def bump_minor(v: VersionNumber) -> VersionNumber:
    return VersionNumber(v.major, v.minor + 1, 0)


def bump_patch(v: VersionNumber) -> VersionNumber:
    return VersionNumber(v.major, v.minor, v.patch + 1)
