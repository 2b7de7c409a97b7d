from typing import Optional


class ServiceException(Exception):
    """Base exception for service errors"""
    pass

class ShapeException(ServiceException):
    """Raised when array dimensions do not chain or match"""
    pass

class ConfigException(ServiceException):
    """Raised when a configuration, layout or prompt spec is invalid"""
    pass

class InputException(ServiceException):
    """Raised when an input is empty or too short to process"""
    pass

class RangeException(ServiceException):
    """Raised when a value falls outside its allowed range"""
    pass

class DegenerateInputException(ServiceException):
    """Raised when a series has no rank variance"""
    pass

class ParseException(ServiceException):
    """Raised when a model response breaks the answer grammar"""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message)
        self.line = line

class DataException(ServiceException):
    """Raised when a ground-truth measurement is missing"""
    pass

class InsufficientDataException(ServiceException):
    """Raised when too few objects survive the join"""

    def __init__(self, message: str, n: int = 0):
        super().__init__(message)
        self.n = n

class ValidationException(ServiceException):
    """Raised when a manifest or data file fails validation"""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line

class BackendException(ServiceException):
    """Base class for language-model backend failures"""
    pass

class FixtureException(BackendException):
    """Raised when the scripted backend has no canned text for an object"""
    pass

class ProtocolException(BackendException):
    """Raised on a non-retryable HTTP status"""

    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status

class RetryExhaustedException(BackendException):
    """Raised when every allowed attempt failed"""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts

class DecodeException(BackendException):
    """Raised when a response body cannot be decoded"""
    pass
