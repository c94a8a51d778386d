"""Exception hierarchy for hyperblock."""


class HyperblockError(Exception):
    """Base class for all package errors."""


class OutOfRange(HyperblockError, ValueError):
    pass


class TooSmall(HyperblockError, ValueError):
    pass


class ParseError(HyperblockError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyInput(HyperblockError, ValueError):
    pass


class Overflow(HyperblockError, OverflowError):
    pass


class InvalidConfig(HyperblockError, ValueError):
    pass


class IndexOutOfRange(HyperblockError, IndexError):
    pass


class TooLarge(HyperblockError, ValueError):
    pass


class UnsupportedM(HyperblockError, ValueError):
    pass


class DegenerateConfig(HyperblockError, RuntimeWarning):
    """Raised (or warned) when an M-step denominator is numerically empty."""


class EigenFailure(HyperblockError, RuntimeError):
    pass


class LengthMismatch(HyperblockError, ValueError):
    pass


class DimensionMismatch(HyperblockError, ValueError):
    pass


class InvalidScenario(HyperblockError, ValueError):
    pass


class UnknownScenario(HyperblockError, KeyError):
    def __str__(self):
        return f"unknown scenario {self.args[0]!r}" if self.args else "unknown scenario"


class BudgetExhausted(HyperblockError, RuntimeError):
    def __init__(self, message, n_signal=0, n_noise=0):
        self.n_signal = n_signal
        self.n_noise = n_noise
        super().__init__(f"{message} (signal={n_signal}, noise={n_noise})")
