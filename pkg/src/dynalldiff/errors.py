"""Exception types raised by the kernel, the matching layer and the CLI."""


class KernelError(Exception):
    """Base class for all errors raised by this package."""


class EmptyDomain(KernelError):
    """A variable was created with an empty domain."""


class UnknownVariable(KernelError):
    """An operation referenced a variable id the store does not know."""


class DomainWipeout(KernelError):
    """A value removal emptied a domain; the branch has been marked failed."""


class NonLifoPop(KernelError):
    """pop_checkpoint was called with a token that is not the newest open one."""


class AlreadyInactive(KernelError):
    """deactivate_constraint on a constraint that is already inactive."""


class NotDeactivated(KernelError):
    """reactivate_constraint on a constraint that was never deactivated."""


class InitFailure(KernelError):
    """A propagator's initialisation reported inconsistency at posting time."""

    def __init__(self, message, handle=None):
        super().__init__(message)
        self.handle = handle


class DuplicateVariable(KernelError):
    """A variable was added to a constraint that already contains it."""


class EmptyHistory(KernelError):
    """remove_variable on a dynamization wrapper with no recorded additions."""


class NonLifoRetract(KernelError):
    """retract_last called with a record that is not the newest unretracted one."""


class UncoveredVariable(KernelError):
    """remove_edges_from_g called with a matching that misses a variable."""


class UnknownEdge(KernelError):
    """remove_edges was asked to delete an edge the graph does not contain."""


class TooLarge(KernelError):
    """A brute-force oracle was asked to process an instance above its cap."""


class ParseError(KernelError):
    """A scenario file failed validation; carries the 1-based line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class LifoViolation(ParseError):
    """A scenario pops more variables than were added at some prefix."""


class UnknownSymbol(ParseError):
    """A scenario referenced a value symbol that was never declared."""
