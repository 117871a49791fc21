"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class CofinitaryError(Exception):
    """Base class for every error raised by this package."""


class InvalidPermutation(CofinitaryError, ValueError):
    pass


class InvalidMap(CofinitaryError, ValueError):
    pass


class DuplicateArg(CofinitaryError, ValueError):
    pass


class DuplicateVal(CofinitaryError, ValueError):
    pass


class EmptyWord(CofinitaryError, ValueError):
    pass


class WordSyntaxError(CofinitaryError, ValueError):
    pass


class InvalidGroupTable(CofinitaryError, ValueError):
    pass


class UnknownElement(CofinitaryError, KeyError):
    pass


class UnknownLetter(CofinitaryError, KeyError):
    pass


class KindMismatch(CofinitaryError, ValueError):
    pass


class NotEmbedKind(CofinitaryError, ValueError):
    pass


class AlreadyDefined(CofinitaryError, ValueError):
    pass


class InvalidSpec(CofinitaryError, ValueError):
    pass


class UnboundedForbidden(CofinitaryError):
    """Raised when cofinitely many extension values would break a condition.

    This only happens when the ground representation satisfies relations
    that let a word collapse around the new pair; the forbidden set is then
    not finite and cannot be returned as a set.
    """


class ClosureConflict(CofinitaryError):
    """Applying relations produced a non-injective letter map."""


class SearchExhausted(CofinitaryError):
    def __init__(self, bound: int, stage: int | None = None, detail: str = ""):
        self.bound = bound
        self.stage = stage
        self.detail = detail
        where = f" at stage {stage}" if stage is not None else ""
        super().__init__(f"no witness below search bound {bound}{where}" + (f": {detail}" if detail else ""))

    def at_stage(self, stage: int) -> "SearchExhausted":
        return SearchExhausted(self.bound, stage, self.detail)


class NoDisjointOrbit(CofinitaryError):
    def __init__(self, msg: str = "every orbit meets the used set", stage: int | None = None):
        self.stage = stage
        super().__init__(msg if stage is None else f"{msg} (stage {stage})")


class InvalidPartition(CofinitaryError, ValueError):
    pass


class UnsupportedDescriptor(CofinitaryError, ValueError):
    pass


class InvalidConfig(CofinitaryError, ValueError):
    """A configuration, schedule or artifact file could not be understood."""
