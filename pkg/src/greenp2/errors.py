"""Exception hierarchy shared across the package."""


class GreenP2Error(Exception):
    """Base class for all package errors."""


class ChartUndefined(GreenP2Error):
    """A point lies on the hyperplane at infinity of the requested chart."""


class OrderExceedsTruncation(GreenP2Error):
    """Every retained series coefficient is below tolerance; raise the truncation."""


class NoConvergence(GreenP2Error):
    """Root iteration hit its iteration cap; best iterates are attached."""

    def __init__(self, message, roots=None):
        super().__init__(message)
        self.roots = roots


class PositiveDimensional(GreenP2Error):
    """The polynomial system has a curve of solutions (resultant vanishes)."""


class IllConditioned(GreenP2Error):
    """Back-substitution could not pick a fiber unambiguously."""


class DegenerateMap(GreenP2Error):
    """Map components share a nontrivial common zero."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class DegreeMismatch(GreenP2Error):
    """Map components do not share a common degree."""


class SolverFailure(GreenP2Error):
    """A chart-level system solve failed; the offending chart is attached."""

    def __init__(self, message, chart=None):
        super().__init__(message)
        self.chart = chart


class IncompleteFiber(GreenP2Error):
    """Multiplicities across charts do not reach the expected intersection count."""


class Unstable(GreenP2Error):
    """Local degree counting never stabilized; the count sequence is attached."""

    def __init__(self, message, counts=None):
        super().__init__(message)
        self.counts = counts


class NonIntegerOrder(GreenP2Error):
    """A fitted vanishing order is too far from an integer."""


class ComponentInvalid(GreenP2Error):
    """A supplied critical component does not divide the Jacobian."""


class GenerationFailed(GreenP2Error):
    """Random map generation kept producing degenerate candidates."""


class ConstructionDegenerate(GreenP2Error):
    """A structured map construction lost degree; internal bug guard."""


class NotSuperattracting(GreenP2Error):
    """Conjugacy check requested at a point that is not superattracting."""


class FitUnstable(GreenP2Error):
    """A slope fit has residual above the acceptance threshold."""


class OnCurve(GreenP2Error):
    """A sample point landed on the pullback curve; caller should resample."""


class ParseError(GreenP2Error):
    """Malformed map file or polynomial expression."""
