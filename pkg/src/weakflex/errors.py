class WeakflexError(Exception):
    """Base class; `exit_code` is what the CLI returns when this escapes."""

    exit_code = 1


class MalformedInputError(WeakflexError, ValueError):
    exit_code = 2


class EmbeddingError(MalformedInputError):
    pass


class ContractError(WeakflexError):
    pass


class PreconditionError(WeakflexError):
    pass


class ResourceGuardError(WeakflexError):
    exit_code = 3


class NoColoringError(WeakflexError):
    """The graph has no proper coloring from the given lists at all."""


class StuckError(WeakflexError):
    """Resolution builder found no reducible piece in a nonempty residual."""

    def __init__(self, message, residual=None, steps=None):
        super().__init__(message)
        self.residual = residual
        self.steps = steps or []
