"""Domain-level exceptions for pipeline errors"""

EXIT_RUNTIME_ERROR = 1
EXIT_USAGE_ERROR = 2


class DomainException(Exception):
    """Base exception for domain errors"""
    def __init__(self, message: str, exit_code: int = EXIT_RUNTIME_ERROR):
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)


class ConfigurationError(DomainException):
    """Raised when configuration or a schema mapping is invalid"""
    def __init__(self, message: str):
        super().__init__(message, EXIT_USAGE_ERROR)


class DataError(DomainException):
    """Raised when input data violates a hard invariant"""
    def __init__(self, message: str):
        super().__init__(message, EXIT_RUNTIME_ERROR)


class ResourceNotFoundError(DomainException):
    """Raised when a requested resource is not found"""
    def __init__(self, resource: str, identifier: object):
        super().__init__(f"{resource} '{identifier}' not found", EXIT_RUNTIME_ERROR)


class ShapeError(DomainException):
    """Raised when tensor shapes are incompatible"""
    def __init__(self, op: str, *shapes: tuple):
        rendered = " vs ".join(str(tuple(s)) for s in shapes)
        super().__init__(f"{op}: incompatible shapes {rendered}", EXIT_RUNTIME_ERROR)


class NumericalError(DomainException):
    """Raised when a forward op produces NaN or Inf"""
    def __init__(self, op: str):
        super().__init__(f"{op}: produced non-finite values", EXIT_RUNTIME_ERROR)


class TrainingError(DomainException):
    """Raised when training cannot continue"""
    def __init__(self, message: str):
        super().__init__(message, EXIT_RUNTIME_ERROR)


class ArtifactMismatchError(DomainException):
    """Raised when a checkpoint does not match the data or config it is used with"""
    def __init__(self, message: str):
        super().__init__(message, EXIT_RUNTIME_ERROR)
