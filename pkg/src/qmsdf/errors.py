"""Exception hierarchy.

The CLI maps these onto exit codes: validation problems exit with 2,
numerical degeneracies (including structure mismatches) with 3.
"""


class QmsError(Exception):
    pass


class ModelValidationError(QmsError, ValueError):
    pass


class ShapeError(ModelValidationError):
    pass


class DegeneracyError(QmsError, ArithmeticError):
    """A numerical decision (clustering, rank) could not be made reliably."""


class StructureError(DegeneracyError):
    """An algebra did not have the block structure an operation requires."""


class StructureMismatchError(DegeneracyError):
    """GKSL operators do not fit the block ansatz of a decomposition."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
