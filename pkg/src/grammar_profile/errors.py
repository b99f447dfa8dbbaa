"""Exception hierarchy shared by all grammar-profile modules."""


class GrammarProfileError(Exception):
    """Base class for all errors raised by this package."""


# --- derivation reading ---------------------------------------------------

class DerivationError(GrammarProfileError):
    pass


class EmptyInput(DerivationError):
    pass


class UnbalancedParens(DerivationError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class MalformedNode(DerivationError):
    def __init__(self, message: str, position: int = -1):
        if position >= 0:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position


class FormatError(GrammarProfileError):
    """A corpus line that cannot be turned into a sentence record."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateItemId(FormatError):
    pass


# --- type hierarchy -------------------------------------------------------

class HierarchyError(GrammarProfileError):
    pass


class CycleDetected(HierarchyError):
    def __init__(self, cycle: list):
        super().__init__("supertype cycle: " + " -> ".join(cycle))
        self.cycle = list(cycle)


class UnterminatedDefinition(HierarchyError):
    def __init__(self, path: str, line_no: int, identifier: str):
        super().__init__(
            f"{path}:{line_no}: definition of '{identifier}' never terminated"
        )
        self.path = path
        self.line_no = line_no
        self.identifier = identifier


class UnknownIdentifier(HierarchyError):
    pass


# --- profiles -------------------------------------------------------------

class ProfileError(GrammarProfileError):
    pass


class EmptyCorpus(ProfileError):
    pass


class SampleTooLarge(ProfileError):
    pass


class NoAuthorsFound(ProfileError):
    pass


class CategoryMismatch(ProfileError):
    pass


class StaleCache(ProfileError):
    """Cached profile does not match the current grammar checksum or format."""


# --- statistics -----------------------------------------------------------

class StatsError(GrammarProfileError):
    pass


class ZeroVector(StatsError):
    pass


class TooFewProfiles(StatsError):
    pass


class EmptyProfile(StatsError):
    pass


class EmptySample(StatsError):
    pass


class ExactTooLarge(StatsError):
    pass


class InvalidP(StatsError):
    pass


# --- reporting / cli ------------------------------------------------------

class UnsupportedFormat(GrammarProfileError):
    pass


class MissingCache(GrammarProfileError):
    pass


class ConfigError(GrammarProfileError):
    pass
