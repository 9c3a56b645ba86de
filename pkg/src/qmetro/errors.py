"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a documented precondition."""


class MethodUnsupportedError(DomainError):
    """A computation method cannot handle the given input (e.g. rank-deficient state)."""


class NumericalFailureError(RuntimeError):
    """A computation produced a non-physical intermediate result."""


class ConfigError(ValueError):
    """A run configuration failed schema validation.

    ``problems`` lists human-readable messages, each naming the offending key path.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
