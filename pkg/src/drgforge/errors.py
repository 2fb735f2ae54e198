"""Exception hierarchy shared by all drgforge modules."""

from __future__ import annotations


class DrgForgeError(Exception):
    """Base class; the CLI maps these to exit code 2."""


class NotPrimePower(DrgForgeError, ValueError):
    def __init__(self, q: int):
        super().__init__(f"{q} is not a prime power")
        self.q = q


class UnsupportedOrder(DrgForgeError, ValueError):
    def __init__(self, q: int):
        super().__init__(f"field order {q} is a prime power above the supported bound")
        self.q = q


class EntryOutOfRange(DrgForgeError, ValueError):
    pass


class EnumerationCapExceeded(DrgForgeError, ValueError):
    pass


class BadParameters(DrgForgeError, ValueError):
    pass


class VertexOutOfRange(DrgForgeError, IndexError):
    pass


class Disconnected(DrgForgeError, ValueError):
    pass


class NotAtDistanceTwo(DrgForgeError, ValueError):
    pass


class SizeCapExceeded(DrgForgeError, ValueError):
    pass


class CertificationFailed(DrgForgeError, ArithmeticError):
    pass


class GraphFormatError(DrgForgeError, ValueError):
    pass


class ParseError(DrgForgeError, ValueError):
    pass


class InfeasibleArray(DrgForgeError, ValueError):
    """An intersection array that fails a parse-time counting condition."""

    def __init__(self, message: str, witness: dict):
        super().__init__(message)
        self.witness = witness


class SignNotConstant(DrgForgeError, ArithmeticError):
    def __init__(self, signs: dict[int, int]):
        super().__init__(f"leading sign of the Terwilliger polynomial varies with i: {signs}")
        self.signs = signs


class DegenerateSmallestEigenvalue(DrgForgeError, ValueError):
    pass


class UnboundedRegion(DrgForgeError, ValueError):
    pass


class TooManyEigenvalues(DrgForgeError, ValueError):
    pass


class NotLocallyGrid(DrgForgeError, ValueError):
    pass


class MuGraphNotHexagon(DrgForgeError, ValueError):
    def __init__(self, x: int, y: int, detail: str = ""):
        msg = f"mu-graph of ({x}, {y}) is not a hexagon"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.pair = (x, y)


class DistinctMuGraphsViolated(DrgForgeError, ValueError):
    def __init__(self, y1: int, y2: int):
        super().__init__(f"vertices {y1} and {y2} share a mu-graph with the base vertex")
        self.pair = (y1, y2)


class AxiomViolation(DrgForgeError, ValueError):
    def __init__(self, axiom: str, witness: tuple):
        super().__init__(f"{axiom} violated at {witness}")
        self.axiom = axiom
        self.witness = witness
