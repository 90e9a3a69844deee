"""Exception hierarchy shared across the package."""


class SymGameError(Exception):
    """Base class for all errors raised by symgame."""


class InvalidProfile(SymGameError, ValueError):
    pass


class InvalidParameter(SymGameError, ValueError):
    pass


class InvalidGame(SymGameError, ValueError):
    pass


class InvalidCandidate(SymGameError, ValueError):
    """A symmetry candidate has the wrong size or is not a permutation."""


class InvalidOrbits(SymGameError, ValueError):
    pass


class InvalidAutomorphism(SymGameError, ValueError):
    pass


class CapExceeded(SymGameError):
    """Group closure grew beyond the configured element cap."""

    def __init__(self, cap: int):
        super().__init__(f"group closure exceeds cap of {cap} elements")
        self.cap = cap


class TooLarge(SymGameError):
    pass


class UnsupportedDegenerate(SymGameError):
    """Full-group search needs every player to have at least two actions."""


class Unsupported(SymGameError):
    pass


class NotInDomain(SymGameError, ValueError):
    pass


class NotTeamGame(SymGameError):
    pass


class NotZeroSum(SymGameError):
    pass


class BudgetExhausted(SymGameError):
    pass


class IterationBudgetExhausted(BudgetExhausted):
    pass
