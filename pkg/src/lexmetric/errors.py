"""Exception hierarchy. Every domain failure derives from LexError."""


class LexError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class LawTooLarge(LexError):
    pass


class InvalidMass(LexError):
    pass


class MissingTable(LexError):
    pass


class Unpunished(LexError):
    pass


class RuleNotInRegulation(LexError):
    pass


class RegulationMismatch(LexError):
    pass


class AbsoluteContinuityViolated(LexError):
    pass


class LawMismatch(LexError):
    pass


class NotAnExtension(LexError):
    pass


class NotMonotone(LexError):
    pass


class EmptyMaximalSet(LexError):
    pass


class PreorderCycle(LexError):
    """Closure of the declared relation collapses a declared strict pair."""


class ParseError(LexError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ValidationError(LexError):
    def __init__(self, message, path=()):
        self.path = tuple(path)
        self.field = format_path(self.path)
        prefix = f"{self.field}: " if self.field else ""
        super().__init__(f"{prefix}{message}")


def format_path(path):
    out = ""
    for part in path:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += f".{part}" if out else str(part)
    return out
