"""Exception types raised by the package."""


class CGSError(Exception):
    """Base class for all package errors."""


class InvalidSymbolError(CGSError, ValueError):
    """A symbol index is outside the alphabet."""


class LengthMismatchError(CGSError, ValueError):
    """A string or set has the wrong length."""


class AlphabetMismatchError(CGSError, ValueError):
    """Two sets over different alphabets or lengths were combined."""


class StructuralError(CGSError, ValueError):
    """A raw layered transition structure is malformed."""


class FormatError(CGSError, ValueError):
    """A serialized DFA could not be decoded."""


class ContractError(CGSError, ValueError):
    """An operation was called outside its precondition."""


class SeedNotClosedError(CGSError):
    """The back-up seed still has unresolved positions."""


class BudgetExceededError(CGSError):
    """The brute-force oracle hit its position budget."""


class CheckpointError(CGSError):
    """A checkpoint directory is missing, corrupt, or belongs to another solve."""
