"""Exception hierarchy.

``InputError`` subclasses signal bad user input (CLI exit code 2); anything
else escaping to the CLI is an internal error (exit code 1).
"""


class SemverMLError(Exception):
    pass


class InputError(SemverMLError):
    pass


class MalformedVersion(InputError):
    pass


class MissingRepo(InputError):
    pass


class MalformedMetadata(InputError):
    pass


class MalformedManifest(SemverMLError):
    pass


class EmptyTimeline(InputError):
    pass


class UnreadableFile(SemverMLError):
    pass


class IncompleteInputs(SemverMLError):
    pass


class SchemaMismatch(InputError):
    pass


class SingleClassInput(SemverMLError):
    pass


class SingleClassTest(SemverMLError):
    pass


class TooFewMinority(SemverMLError):
    pass


class ClassSmallerThanK(SemverMLError):
    pass


class EmptySample(SemverMLError):
    pass


class DivisionByZeroBaseline(SemverMLError):
    pass


class NoModel(InputError):
    pass


class NoPriorRelease(InputError):
    pass
