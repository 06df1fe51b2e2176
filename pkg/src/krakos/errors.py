"""Exception hierarchy shared by every krakos module."""


class KrakosError(Exception):
    """Base class for all library errors."""


class InvalidInput(KrakosError, ValueError):
    """Operands have incompatible shapes or are otherwise malformed."""


class InvalidOptions(KrakosError, ValueError):
    """Counts, tolerances or bounding boxes outside their allowed range."""


class InvalidBipartition(InvalidInput):
    """A cut does not match the number of qubits it is applied to."""


class NotHermitian(InvalidInput):
    pass


class NotAState(InvalidInput):
    """Density matrix trace differs from one."""


class NotPositive(InvalidInput):
    """Density matrix has an eigenvalue below the clamping window."""


class NotUnitary(InvalidInput):
    def __init__(self, residual: float, message: str | None = None):
        self.residual = residual
        super().__init__(message or f"matrix is not unitary (residual {residual:.3e})")


class NoFixedPoint(KrakosError, ValueError):
    pass


class ParseError(InvalidInput):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")
