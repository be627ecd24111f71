"""Exception types shared across the toolkit.

Every failure mode that a caller might want to distinguish gets its own
class; anything that signals a broken internal invariant (as opposed to
bad input) derives from InternalInvariantError so the CLI can map it to
a distinct exit code.
"""


class TorusMCGError(Exception):
    """Base class for all toolkit errors."""


class RankMismatch(TorusMCGError):
    pass


class IndexOutOfRange(TorusMCGError):
    pass


class WordLengthExceeded(TorusMCGError):
    """A word grew past the configured hard cap."""


class NotUnimodular(TorusMCGError):
    pass


class NotAnosov(TorusMCGError):
    pass


class DegenerateFixedSet(TorusMCGError):
    """det(M^k - I) = 0, so the fixed-point set is not finite."""


class NotALoop(TorusMCGError):
    pass


class UnknownPuncture(TorusMCGError):
    pass


class PeripheralViolation(TorusMCGError):
    """An automorphism does not preserve the labelled peripheral classes."""


class IterationBudgetExceeded(TorusMCGError):
    """A bounded search or move loop ran out of budget."""


class NotIrreducible(TorusMCGError):
    pass


class RuleViolation(TorusMCGError):
    """A gluing pairing violates one of the three gluing rules."""

    def __init__(self, rule: int, message: str):
        super().__init__(f"rule ({rule}): {message}")
        self.rule = rule


class NonSurface(TorusMCGError):
    pass


class Disconnected(TorusMCGError):
    pass


class OrientationError(TorusMCGError):
    pass


class UnsupportedGenus(TorusMCGError):
    pass


class InternalInvariantError(TorusMCGError):
    """A derived fact failed re-verification; never a caller error."""
