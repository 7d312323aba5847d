"""Exception hierarchy shared by every module of the engine."""


class TDatalogError(Exception):
    """Base class for all engine errors."""


class ConfigError(TDatalogError, ValueError):
    """An invalid connective, strategy or numeric parameter."""


class DegreeError(ConfigError):
    """A truth degree outside [0, 1]."""


class ContractViolation(TDatalogError):
    """A caller broke an operation's precondition."""


class ValidationError(TDatalogError):
    """A rule or program violates a structural invariant."""

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class Diagnostic:
    __slots__ = ("line", "column", "message")

    def __init__(self, line, column, message):
        self.line = line
        self.column = column
        self.message = message

    def __str__(self):
        return f"{self.line}:{self.column}: {self.message}"

    def __repr__(self):
        return f"Diagnostic({self.line}, {self.column}, {self.message!r})"


class ParseError(TDatalogError):
    """Raised with every diagnostic collected while reading a file."""

    def __init__(self, diagnostics, source=None):
        self.diagnostics = list(diagnostics)
        self.source = source
        prefix = f"{source}:" if source else ""
        super().__init__("\n".join(prefix + str(d) for d in self.diagnostics))


class NotStratifiable(TDatalogError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__(
            "program is not stratifiable; cycle through a unary operator: "
            + " -> ".join(self.cycle)
        )


class Undecided(TDatalogError):
    """A procedure stopped at its step or search cap without an answer."""


class InvariantViolation(TDatalogError):
    """An internal consistency check failed; this indicates a bug."""
