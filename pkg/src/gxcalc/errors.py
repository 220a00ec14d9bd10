"""Exception types shared across the package."""


class GxError(Exception):
    """Base class for all gxcalc errors."""


class AllZeroMatrix(GxError):
    """Phase canonicalization needs at least one entry above the dedup tolerance."""


class ShapeMismatch(GxError):
    pass


class NonConvergent(GxError):
    """Power iteration failed to settle; the fusion ring is malformed."""


class NotClosed(GxError):
    """Dimension-one labels did not close under fusion."""


class UnknownName(GxError):
    pass


class DegenerateBicharacter(GxError):
    pass


class MissingSymbol(GxError):
    """An admissible F/R/U/eta entry is required but absent from the category data."""


class NoConvergence(GxError):
    """Phase fitting did not reach the residual target."""


class NotFixedPoint(GxError):
    """Braided object is not fixed by its own flux action."""


class DiagramSyntaxError(GxError):
    def __init__(self, line: int, col: int, expected: str):
        self.line = line
        self.col = col
        self.expected = expected
        super().__init__(f"line {line}, col {col}: expected {expected}")


class AdmissibilityError(GxError):
    """A vertex with N = 0 appeared in a diagram."""


class SectorError(GxError):
    """Group-grading bookkeeping failed for a diagram slice."""


class NonConfluent(GxError):
    """Two rewrite strategies disagreed beyond tolerance (internal assertion)."""


class UnsupportedConfiguration(GxError):
    """Diagram uses a feature outside the supported move set (e.g. loops around
    defect strands without trivial U/eta data)."""
