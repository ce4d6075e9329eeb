"""Version parsing, precedence, and transition labeling.

Run with: python demos/01_semver_labeling.py
"""

from semverml.semver import (
    ReleaseType,
    compare,
    label_transition,
    parse_version,
)

# Parsing accepts plain triples, git-style "v" prefixes, and pre-release
# tags. Anything that is not three dot-separated integers raises.
for text in ("3.2.1", "v2.0.0", "1.2.3-beta"):
    v = parse_version(text)
    print(f"{text!r:14} -> major={v.major} minor={v.minor} patch={v.patch} "
          f"tag={v.prerelease}")

# Precedence compares the triple left to right; a tagged version orders
# below the bare one.
base = parse_version("3.2.1")
for other in ("4.0.0", "3.3.1", "3.2.2", "2.2.1", "3.1.1", "3.2.0"):
    rel = {-1: "<", 0: "==", 1: ">"}[compare(base, parse_version(other))]
    print(f"3.2.1 {rel} {other}")

# A release sequence labels each step by the highest component that grew.
# Backports (a later release with a lower version) and exact re-tags are
# flagged so the mining layer can drop them.
history = ["1.0.0", "1.1.0", "1.1.1", "2.0.0", "1.9.9", "2.0.1", "2.0.1"]
print("\nrelease history:", " -> ".join(history))
prev = parse_version(history[0])
for text in history[1:]:
    nxt = parse_version(text)
    label = label_transition(prev, nxt)
    note = "" if label in ReleaseType.LABELS else "   (dropped from datasets)"
    print(f"  {prev} -> {nxt}: {label}{note}")
    if label in ReleaseType.LABELS:
        prev = nxt
