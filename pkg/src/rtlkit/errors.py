"""Exception hierarchy shared by all rtlkit modules."""


class RTLError(Exception):
    """Base class for every error raised by rtlkit."""


class DomainError(RTLError, ValueError):
    """A numeric argument lies outside the domain of a model equation."""


class ArgumentError(RTLError, ValueError):
    """Malformed arguments: wrong lengths, empty lists, bad enum values."""


class InfeasibleError(RTLError):
    """No threshold exists (or is reachable) that realizes the requested gate."""

    def __init__(self, message, window=None):
        super().__init__(message)
        self.window = window


class CapacityError(RTLError, ValueError):
    """Input exceeds a size guard (variable count, fan-in enumeration)."""


class ParseError(RTLError, ValueError):
    """Text input could not be parsed. Carries a 1-based location."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc += ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column
        self.reason = message


class NetlistError(ParseError):
    """Structural netlist violation (cycle, undriven net, duplicate driver)."""
