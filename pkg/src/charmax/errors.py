"""Exception types shared across modules.

Each carries a short ``code`` used as the CLI's machine-readable error prefix.
"""


class CharmaxError(Exception):
    code = "E_INTERNAL"


class ResourceLimitError(CharmaxError):
    """A table or enumeration would exceed its configured budget."""

    code = "E_BUDGET"


class NotFoundError(CharmaxError):
    """A search finished without a qualifying element."""

    code = "E_NOTFOUND"


class NonConvergenceError(CharmaxError, RuntimeError):
    code = "E_NONCONVERGENCE"


class IdentityCheckError(CharmaxError):
    """A numerically verified identity exceeded its tolerance."""

    code = "E_IDENTITY"
