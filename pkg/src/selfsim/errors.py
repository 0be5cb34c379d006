"""Exception hierarchy. Each error carries the CLI exit code it maps to."""


class SelfSimError(Exception):
    exit_code = 1


class ParseError(SelfSimError):
    exit_code = 2


class Unsolvable(SelfSimError):
    exit_code = 3


class HypothesisViolated(SelfSimError):
    """A replayed proof step failed; ``check`` names the assertion."""

    exit_code = 4

    def __init__(self, check, detail="", where=None):
        self.check = check
        self.detail = detail
        self.where = where
        msg = check if not detail else f"{check}: {detail}"
        if where is not None:
            msg += f" (at {where})"
        super().__init__(msg)


class PrecisionError(SelfSimError):
    exit_code = 5


class PrecisionExhausted(PrecisionError):
    pass


class PrecisionTooSmall(PrecisionError):
    pass


class RankDeficientAtPrecision(PrecisionError):
    pass


class NotAUnit(SelfSimError, ArithmeticError):
    pass


class NotDivisible(SelfSimError, ArithmeticError):
    pass


class NotInvertible(SelfSimError, ArithmeticError):
    pass


class NotClosed(SelfSimError):
    pass
