"""Exception hierarchy for metric_forge.

Every library error derives from MetricForgeError so callers (and the CLI)
can catch one base class and report the error name.
"""


class MetricForgeError(Exception):
    """Base class for all metric_forge errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


class MalformedInput(MetricForgeError):
    pass


# -- metric validation ------------------------------------------------------

class AsymmetricMatrix(MetricForgeError):
    pass


class NegativeDistance(MetricForgeError):
    pass


class ZeroOffDiagonal(MetricForgeError):
    pass


class NonzeroDiagonal(MetricForgeError):
    pass


class TriangleViolation(MetricForgeError):
    """Triangle inequality failed; carries the witnessing triple (i, j, k)."""

    def __init__(self, i: int, j: int, k: int, slack: float):
        self.triple = (i, j, k)
        self.slack = slack
        super().__init__(
            f"d({i},{k}) > d({i},{j}) + d({j},{k}) by {slack:.3g}"
        )


# -- graphs and maps --------------------------------------------------------

class DisconnectedGraph(MetricForgeError):
    pass


class CoincidentImages(MetricForgeError):
    """Two distinct source points map to identical targets (infinite contraction)."""

    def __init__(self, i: int, j: int):
        self.pair = (i, j)
        super().__init__(f"points {i} and {j} have identical images")


class InvalidParameters(MetricForgeError):
    pass


class GenerationFailure(MetricForgeError):
    pass


class NotRegular(MetricForgeError):
    pass


class TooLarge(MetricForgeError):
    pass


class DegenerateSpace(MetricForgeError):
    pass


# -- certificates and the c2 solver -----------------------------------------

class DimensionMismatch(MetricForgeError):
    pass


class InvalidCertificate(MetricForgeError):
    """Certificate invariant failed; carries a witness description."""

    def __init__(self, reason: str, witness=None):
        self.witness = witness
        super().__init__(reason)


class OddOrder(MetricForgeError):
    pass


class NoSpectralGap(MetricForgeError):
    pass


class CertificateCheckFailed(MetricForgeError):
    pass


class ConvergenceFailure(MetricForgeError):
    """Feasibility search hit its iteration cap with an ambiguous residual.

    Carries the bracket (lo, hi) that was established before the failure.
    """

    def __init__(self, lo: float, hi: float, residual: float):
        self.bracket = (lo, hi)
        self.residual = residual
        super().__init__(
            f"ambiguous residual {residual:.3g} inside bracket [{lo:.6g}, {hi:.6g}]"
        )


class DegenerateCertificate(UserWarning):
    """Warning: certificate has no negative off-diagonal mass; value floored at 1."""


# -- flow / cut --------------------------------------------------------------

class Infeasible(MetricForgeError):
    pass


class Unbounded(MetricForgeError):
    pass


class NumericalFailure(MetricForgeError):
    pass


class NoSeparatedCommodity(MetricForgeError):
    pass
