"""Exception hierarchy shared by all deciders."""

from __future__ import annotations


class MetzsignError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(MetzsignError, ValueError):
    pass


class NotMetzlerError(MetzsignError, ValueError):
    def __init__(self, what: str = "matrix") -> None:
        super().__init__(f"{what} is not Metzler")


class IndefiniteError(MetzsignError, ValueError):
    """An operation that needs a definite sign-matrix received an Indef entry."""


class PreconditionError(MetzsignError, ValueError):
    pass


class CycleError(PreconditionError):
    def __init__(self, cycle: list[int]) -> None:
        self.cycle = cycle
        super().__init__(f"graph has a cycle: {cycle}")


class SingularMatrixError(MetzsignError, ArithmeticError):
    pass


class CapExceededError(MetzsignError, ValueError):
    def __init__(self, what: str, value: int, cap: int) -> None:
        self.what, self.value, self.cap = what, value, cap
        super().__init__(f"{what}={value} exceeds cap {cap}")


class InconsistencyError(MetzsignError, RuntimeError):
    """Two routes that must agree by theory returned different answers."""

    def __init__(self, message: str, results: dict | None = None) -> None:
        self.results = dict(results or {})
        super().__init__(message)
