"""Exception hierarchy.

Every error carries a stable ``code`` string so that the CLI and reports can
name the violated precondition without parsing messages.
"""


class LPError(Exception):
    code = "LP_ERROR"


class GridTooSmall(LPError):
    code = "GRID_TOO_SMALL"


class UnresolvedBandwidth(LPError):
    code = "UNRESOLVED_BANDWIDTH"


class OrderExceeded(LPError):
    code = "ORDER_EXCEEDED"


class OrderOutOfRange(LPError):
    code = "ORDER_OUT_OF_RANGE"


class AliasingError(LPError):
    code = "ALIASING"


class NonpositiveRegularity(LPError):
    code = "NONPOSITIVE_REGULARITY"


class IntegerRegularity(LPError):
    code = "INTEGER_REGULARITY"


class InsufficientScales(LPError):
    code = "INSUFFICIENT_SCALES"


class ZeroMultiIndex(LPError):
    code = "ZERO_MULTIINDEX"


class UnboundComponent(LPError):
    code = "UNBOUND_COMPONENT"


class UnknownIdentity(LPError):
    code = "UNKNOWN_IDENTITY"
