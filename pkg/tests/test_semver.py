import pytest
from hypothesis import given, strategies as st

from semverml.errors import MalformedVersion
from semverml.semver import (
    EQUAL,
    GREATER,
    LESS,
    ReleaseType,
    VersionNumber,
    bump_major,
    bump_minor,
    bump_patch,
    compare,
    label_transition,
    parse_version,
)


def v(text):
    return parse_version(text)


class TestParse:
    def test_plain_triple(self):
        parsed = v("3.2.1")
        assert (parsed.major, parsed.minor, parsed.patch) == (3, 2, 1)
        assert parsed.prerelease is None
        assert parsed.raw == "3.2.1"

    def test_prerelease_tag(self):
        parsed = v("1.2.3-beta")
        assert (parsed.major, parsed.minor, parsed.patch) == (1, 2, 3)
        assert parsed.prerelease == "beta"

    def test_leading_v_stripped(self):
        assert v("v2.0.1") == VersionNumber(2, 0, 1)

    @pytest.mark.parametrize("bad", ["1.2", "", "a.b.c", "1.2.3.4", "1..3",
                                     "-1.2.3", "1.2.-3", "1.2.3beta"])
    def test_malformed(self, bad):
        with pytest.raises(MalformedVersion):
            v(bad)


class TestCompare:
    @pytest.mark.parametrize("lo,hi", [
        ("3.2.1", "4.0.0"),
        ("3.2.1", "3.3.1"),
        ("3.2.1", "3.2.2"),
        ("2.2.1", "3.2.1"),
        ("3.1.1", "3.2.1"),
        ("3.2.0", "3.2.1"),
    ])
    def test_precedence_examples(self, lo, hi):
        assert compare(v(lo), v(hi)) == LESS
        assert compare(v(hi), v(lo)) == GREATER

    def test_equal(self):
        assert compare(v("3.2.1"), v("3.2.1")) == EQUAL

    def test_prerelease_below_bare(self):
        assert compare(v("1.2.3-beta"), v("1.2.3")) == LESS
        assert compare(v("1.2.3-beta"), v("1.2.3-beta")) == EQUAL


class TestLabelTransition:
    def test_major(self):
        assert label_transition(v("1.1.1"), v("2.1.1")) == ReleaseType.MAJOR

    def test_minor(self):
        assert label_transition(v("3.2.6"), v("3.3.6")) == ReleaseType.MINOR

    def test_patch(self):
        assert label_transition(v("2.2.1"), v("2.2.2")) == ReleaseType.PATCH

    def test_backport(self):
        assert label_transition(v("3.3.6"), v("3.3.5")) == ReleaseType.BACKPORT

    def test_no_change(self):
        assert label_transition(v("1.0.0"), v("1.0.0")) == ReleaseType.NO_CHANGE

    def test_lower_major_is_backport_even_if_minor_grew(self):
        assert label_transition(v("2.0.0"), v("1.9.9")) == ReleaseType.BACKPORT

    def test_prerelease_graduation_is_patch(self):
        assert label_transition(v("1.2.3-beta"), v("1.2.3")) == ReleaseType.PATCH


versions = st.builds(
    VersionNumber,
    st.integers(0, 40), st.integers(0, 40), st.integers(0, 40),
    st.one_of(st.none(), st.sampled_from(["alpha", "beta", "rc1"])),
)


class TestOrderProperties:
    @given(versions, versions)
    def test_antisymmetric_and_total(self, a, b):
        ab, ba = compare(a, b), compare(b, a)
        assert ab in (LESS, EQUAL, GREATER)
        assert ab == -ba

    @given(versions, versions, versions)
    def test_transitive(self, a, b, c):
        if compare(a, b) != GREATER and compare(b, c) != GREATER:
            assert compare(a, c) != GREATER

    @given(versions, versions)
    def test_release_labels_imply_precedence(self, prev, nxt):
        label = label_transition(prev, nxt)
        if label in ReleaseType.LABELS:
            assert compare(prev, nxt) == LESS

    @given(versions)
    def test_bumps(self, ver):
        assert label_transition(ver, bump_major(ver)) == ReleaseType.MAJOR
        assert label_transition(ver, bump_minor(ver)) == ReleaseType.MINOR
        assert label_transition(ver, bump_patch(ver)) == ReleaseType.PATCH
