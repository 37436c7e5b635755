from typing import Optional


class GesturaError(Exception):
    """
    Base class of every error raised by gestura.

    Each subclass carries a short machine-readable ``kind`` and the exit code the
    command line front end returns when the error reaches it.
    """
    kind = 'error'
    exit_code = 1

    def describe(self) -> str:
        return f'gestura: {self.kind}: {self}'


class ParseError(GesturaError, ValueError):
    kind = 'parse-error'
    exit_code = 2

    def __init__(self, message: str, position: Optional[int] = None):
        super().__init__(message)
        self.position = position

    def describe(self) -> str:
        if self.position is None:
            return super().describe()
        return f'gestura: {self.kind}: pos={self.position}: {self}'


class InventoryError(ParseError):
    kind = 'inventory-error'


class UnsupportedStructureError(ParseError):
    kind = 'unsupported-structure'


class ConfigError(GesturaError, ValueError):
    kind = 'config-error'
    exit_code = 3


class DomainError(ConfigError):
    kind = 'domain-error'


class RangeError(DomainError):
    kind = 'range-error'


class NotApplicableError(ConfigError):
    kind = 'not-applicable'


class OutputError(ConfigError):
    kind = 'io-error'


class ConsistencyError(GesturaError, RuntimeError):
    kind = 'consistency-error'
    exit_code = 4


def with_context(error: GesturaError, context: str) -> GesturaError:
    """
    Returns a copy of the error of the same class whose message is prefixed with context.
    """
    if isinstance(error, ParseError):
        return type(error)(f'{context}: {error}', error.position)
    return type(error)(f'{context}: {error}')
