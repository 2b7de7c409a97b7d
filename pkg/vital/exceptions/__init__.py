from .service_exceptions import (
    ServiceException,
    ShapeException,
    ConfigException,
    InputException,
    RangeException,
    DegenerateInputException,
    ParseException,
    DataException,
    InsufficientDataException,
    ValidationException,
    BackendException,
    FixtureException,
    ProtocolException,
    RetryExhaustedException,
    DecodeException
)

__all__ = [
    'ServiceException',
    'ShapeException',
    'ConfigException',
    'InputException',
    'RangeException',
    'DegenerateInputException',
    'ParseException',
    'DataException',
    'InsufficientDataException',
    'ValidationException',
    'BackendException',
    'FixtureException',
    'ProtocolException',
    'RetryExhaustedException',
    'DecodeException'
]
