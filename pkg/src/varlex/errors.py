"""Exception types shared across the package."""


class DomainError(ValueError):
    """An evaluation point or window lies outside a function's domain."""


class ContractError(ValueError):
    """A documented precondition was violated (wrong dimension, bad exponent
    ordering, missing decomposition, ...)."""


class DivergenceError(ArithmeticError):
    """A series or integral that must be finite is provably divergent."""


class ConfigError(ValueError):
    """A CLI/JSON configuration references unknown names or bad values."""
