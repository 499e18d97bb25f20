"""Exceptions shared across the workbench."""


class CohlabError(Exception):
    """Base class.  ``reason`` is a short machine-readable tag."""

    reason = "error"

    def to_json(self) -> dict:
        return {"reason": self.reason, "message": str(self)}


class OracleBudgetError(CohlabError):
    reason = "oracle-budget"


class UndecidableAtCap(CohlabError):
    """A halting question neither halted nor was loop-certified within the cap."""

    reason = "undecidable-at-cap"

    def __init__(self, what, stage=None):
        self.stage = stage
        where = f" at stage {stage}" if stage is not None else ""
        super().__init__(f"undecided within cap{where}: {what}")


class Unstable(CohlabError):
    reason = "unstable"


class BoundViolation(CohlabError):
    reason = "bound-violation"


class NotATree(CohlabError):
    reason = "not-a-tree"

    def __init__(self, string: str):
        self.string = string
        super().__init__(f"not closed under initial segments: missing {string!r}")


class NodeBudgetExceeded(CohlabError):
    reason = "node-budget"


class DeadEnd(CohlabError):
    reason = "dead-end"

    def __init__(self, string: str):
        self.string = string
        super().__init__(f"no viable extension of {string!r}")


class SearchExhausted(CohlabError):
    reason = "search-exhausted"

    def __init__(self, stage: int, bound: int):
        self.stage = stage
        super().__init__(f"no element for stage {stage} below {bound}")


class NotCohesive(CohlabError):
    reason = "not-cohesive"


class NotComplementary(CohlabError):
    reason = "not-complementary"


class RegisterPressure(CohlabError):
    reason = "register-pressure"


class SchemaError(CohlabError):
    reason = "schema"
