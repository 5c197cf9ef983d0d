"""Exception and warning classes used across the package."""


class QGraphError(Exception):
    """Base class for all errors raised by qgreen."""


# graph model ---------------------------------------------------------------

class GraphError(QGraphError, ValueError):
    """Invalid graph description."""


class NonPositiveLength(GraphError):
    pass


class Disconnected(GraphError):
    pass


class DegreeMismatch(GraphError):
    pass


class DanglingReference(GraphError):
    pass


class UnknownVertex(GraphError, KeyError):
    pass


class UnknownLead(GraphError, KeyError):
    pass


class UnknownEdge(GraphError, KeyError):
    pass


class InvalidPosition(GraphError):
    pass


# vertex physics ------------------------------------------------------------

class VertexError(QGraphError, ValueError):
    pass


class DegenerateK(VertexError):
    """The closed-form amplitudes have a pole at the requested wavenumber."""


class VariantDegreeMismatch(VertexError):
    pass


class InvalidABCD(VertexError):
    pass


# solver --------------------------------------------------------------------

class SolverError(QGraphError, ArithmeticError):
    pass


class ZeroWavenumber(SolverError, ValueError):
    pass


class PoleAtK(SolverError):
    """The family system is singular: ``k`` sits on a spectral point.

    Attributes
    ----------
    k : complex
        Offending wavenumber.
    condition : float
        Condition number of the family matrix at ``k``.
    """

    def __init__(self, k, condition):
        super().__init__(f"family system singular at k={k!r} (cond={condition:.3g})")
        self.k = k
        self.condition = condition


class NoLeads(SolverError, ValueError):
    pass


class GraphHasLeads(SolverError, ValueError):
    pass


class BoundaryMismatch(QGraphError, ValueError):
    pass


class DegeneratePole(SolverError):
    pass


class NotARoot(SolverError):
    pass


class NotUnitModulus(SolverError):
    pass


class NonConservingVertex(SolverError, ValueError):
    """Spectral analysis requested on a graph with non flux-conserving vertices."""


class UnsupportedVertexFamily(QGraphError, TypeError):
    pass


class ExplosionGuard(QGraphError, RuntimeError):
    pass


class ParseError(QGraphError, ValueError):
    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


# warnings ------------------------------------------------------------------

class ResonantDenominatorWarning(RuntimeWarning):
    """A composition denominator is numerically zero; ``k`` is a spectral point."""


class ScanTooCoarseWarning(RuntimeWarning):
    """Two roots were found closer than twice the scan step."""
