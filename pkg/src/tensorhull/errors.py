"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class CapacityError(RuntimeError):
    """A request exceeds a configured level, memory or size budget.

    The offending parameter and the value that would have been required are
    kept on the instance so callers (the CLI in particular) can report them.
    """

    def __init__(self, message, parameter=None, required=None):
        super().__init__(message)
        self.parameter = parameter
        self.required = required
