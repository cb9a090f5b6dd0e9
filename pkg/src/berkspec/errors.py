"""Exception types shared across the package."""


class BerkspecError(Exception):
    """Base class for every error raised by the library."""


class PoleAtTypeOnePoint(BerkspecError):
    pass


class IrreducibleDenominator(BerkspecError):
    pass


class PoleOnCircle(BerkspecError):
    def __init__(self, message, pole=None):
        super().__init__(message)
        self.pole = pole


class Unsupported(BerkspecError):
    pass


class InvalidInterval(BerkspecError):
    pass


class NoComplement(BerkspecError):
    pass


class MarginTooLarge(BerkspecError):
    pass


class BasisNotNeighborhood(BerkspecError):
    pass


class NotCyclic(BerkspecError):
    pass


class SingularSystem(BerkspecError):
    pass


class PoleAtPoint(BerkspecError):
    pass


class OutOfRange(BerkspecError):
    pass


class NotTriangular(BerkspecError):
    pass


class NotSeparated(BerkspecError):
    pass


class NotPiecewiseAffine(BerkspecError):
    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class DiscontinuityDetected(BerkspecError):
    pass


class NeverStabilized(BerkspecError):
    pass


class PoleOnBoundary(BerkspecError):
    pass


class EigenvalueOnBoundary(BerkspecError):
    pass


class NonSplitCharPoly(BerkspecError):
    pass


class ParseError(BerkspecError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column


class UnboundConstant(ParseError):
    pass


class NonRationalLiteral(ParseError):
    pass
