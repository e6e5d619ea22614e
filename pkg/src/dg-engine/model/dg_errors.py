class DgError(Exception):
    """Root of every error raised by the engine."""


class FieldMismatchError(DgError, ValueError):
    pass


class ShapeMismatchError(DgError, ValueError):
    pass


class NotAComplexError(DgError, ValueError):
    pass


class WindowOverflowError(DgError, ValueError):
    pass


class SideMismatchError(DgError, TypeError):
    pass


class AlgebraMismatchError(DgError, ValueError):
    pass


class InvalidStructureError(DgError, ValueError):
    pass


class NotAChainMapError(DgError, ValueError):
    pass


class NotAConflationError(DgError, ValueError):
    pass


class PreconditionError(DgError, ValueError):
    pass


class NotUnitaryError(PreconditionError):
    pass


class LanguageError(DgError):
    def __init__(self, message, line=None, column=None):
        self.message, self.line, self.column = message, line, column
        if line is not None and column is not None:
            message = f"Line {line}, column {column}: {message}"
        elif line is not None:
            message = f"Line {line}: {message}"
        super().__init__(message)
