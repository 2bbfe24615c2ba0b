"""Exception types shared across the package.

Exit-code mapping used by the CLI: ContractError -> 2, CapacityError -> 3,
InputParseError -> 4.
"""


class ContractError(ValueError):
    """An input violates a documented precondition or invariant."""


class DimensionError(ContractError):
    """Operand dimensions are inconsistent or exceed the configured cap."""


class CapacityError(RuntimeError):
    """A computation would exceed its configured size cap (shrink n or raise m)."""


class DegenerateRateError(ContractError):
    """A rate formula has a vanishing denominator for these parameters."""


class InputParseError(ValueError):
    """Malformed external input (JSON ensemble file, CSV, CLI literal)."""
