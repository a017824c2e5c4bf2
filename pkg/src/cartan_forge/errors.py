"""Exception types shared across the package."""


class CartanForgeError(Exception):
    """Base class for every error raised by cartan_forge."""


class RingError(CartanForgeError, ValueError):
    """Malformed ring description or an arithmetic request the ring cannot honour."""


class DimensionError(CartanForgeError, ValueError):
    pass


class RingMismatchError(CartanForgeError, ValueError):
    pass


class PreconditionError(CartanForgeError, ValueError):
    """An operation was called outside its documented domain."""


class SchemaError(CartanForgeError, ValueError):
    """A JSON document does not describe a valid object."""


class BudgetExceeded(CartanForgeError):
    """An exhaustive search would exceed its size or time ceiling."""
