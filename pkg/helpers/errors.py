from typing import Any


class HyplabError(Exception):
    """
    Base class for every error raised by the workbench.

    Args:
        message (str): Human readable description.
        witness (dict, optional): The concrete values that triggered the error
            (an index, a pair, a schedule position...). Defaults to an empty dict.
    """

    def __init__(self, message: str, witness: dict[str, Any] | None = None):
        super().__init__(message)
        self.message = message
        self.witness = dict(witness or {})

    def to_dict(self) -> dict[str, Any]:
        return {
            "error": self.__class__.__name__,
            "message": self.message,
            "witness": {k: _jsonable(v) for k, v in self.witness.items()},
        }


class PreconditionError(HyplabError, ValueError):
    pass


class ScheduleError(HyplabError, ValueError):
    pass


class CapExceededError(HyplabError, ValueError):
    pass


class PrecisionBudgetError(HyplabError, OverflowError):
    pass


class BlockCollisionError(HyplabError, ValueError):
    pass


class OracleError(HyplabError, RuntimeError):
    """Raised when a caller supplied oracle fails; the failing index is in `witness`."""


def _jsonable(value: Any):
    if isinstance(value, (int, str, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return str(value)
