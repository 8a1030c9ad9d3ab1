"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands disagree on label bound n or ground-set size k."""


class OrientedCycleError(ValueError):
    """An orientation that was required to be a linear order is not one."""


class FamilyError(ValueError):
    """An object is not a member of the family an operation requires."""


class BitBudgetError(RuntimeError):
    """An enumeration would exceed the configured packed-key bit budget."""


class IntegrityError(RuntimeError):
    """An internal invariant that should be impossible to violate failed."""


class CapExceededError(RuntimeError):
    """A complex materialization or matrix exceeds its configured cap.

    Raised instead of silently truncating.
    """


class FalsificationError(RuntimeError):
    """A verified run contradicted a certified claim.

    This is the loudest output the package can produce: it carries the full
    offending state so the failure can be replayed.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = dict(state or {})
