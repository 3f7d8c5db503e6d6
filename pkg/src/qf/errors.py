"""Exception hierarchy shared by all qf modules."""


class QFError(Exception):
    """Base class for every error raised by the library."""


class NotLatin(QFError, ValueError):
    def __init__(self, kind, index):
        self.kind = kind
        self.index = index
        super().__init__(f"{kind} {index} repeats a value")


class BadSymbol(QFError, ValueError):
    def __init__(self, row, col, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"entry ({row}, {col}) = {value} is out of range")


class UnknownLaw(QFError, KeyError):
    pass


class SizeCapExceeded(QFError):
    pass


# enumeration cap uses the same semantics as the generic work cap
CapExceeded = SizeCapExceeded


class NotNormal(QFError):
    pass


class NotCongruence(QFError):
    pass


class NotF(QFError):
    """Raised when an operation requires an F-quasigroup."""


class NotNK(QFError):
    pass


class NotStrongInput(QFError):
    pass


class BadShift(QFError):
    pass


class InvalidForm(QFError):
    pass


class InternalAssertionFailed(QFError, AssertionError):
    """A consequence that must always hold failed; this indicates a bug."""


class InternalInconsistency(InternalAssertionFailed):
    pass


class ExampleSanityFailed(QFError):
    pass


class ExhaustedAttempts(QFError):
    pass


class ParseError(QFError, ValueError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")
