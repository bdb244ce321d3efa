class StorydecError(Exception):
    """Base for everything this package raises on purpose."""


class ShapeError(StorydecError):
    pass


class ParseError(StorydecError):
    pass


class TrainingFailureError(StorydecError):
    pass
