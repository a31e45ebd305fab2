"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures without a
lookup table: 3 for problems with the input data, 4 for numeric failures.
"""


class WavevolError(Exception):
    exit_code = 4


class DataError(WavevolError):
    exit_code = 3


class NumericError(WavevolError):
    exit_code = 4


class NoData(DataError):
    pass


class MalformedRow(DataError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line


class TooShort(DataError):
    pass


class Undefined(NumericError):
    pass


class Unsupported(NumericError):
    pass


class BadFilter(NumericError):
    pass


class ScaleTooSmall(NumericError):
    pass


class SignalTooShort(NumericError):
    def __init__(self, message: str, max_scale: float):
        super().__init__(message)
        self.max_scale = max_scale


class RefusedSize(NumericError):
    pass


class UnknownScale(NumericError):
    pass


class DegenerateDistribution(NumericError):
    pass


class NoUsableScales(NumericError):
    pass


class BadConfig(WavevolError):
    exit_code = 2
