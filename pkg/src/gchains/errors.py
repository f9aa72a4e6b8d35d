"""Exception hierarchy shared by every module."""


class GChainsError(Exception):
    pass


class UnknownSymbol(GChainsError, ValueError):
    pass


class TolUnachievable(GChainsError):
    pass


class BudgetExceeded(GChainsError):
    pass


class NoAnalyticBound(GChainsError):
    pass


class AlphabetInfinite(GChainsError):
    pass


class InconsistentBounds(GChainsError, ValueError):
    pass


class IncompatibleSupports(GChainsError):
    pass


class SpecError(GChainsError, ValueError):
    """Malformed kernel specification or constructor parameters."""


class BadRow(SpecError):
    pass


class SinkVertex(SpecError):
    pass


class BadTotal(SpecError):
    pass


class BadQ(SpecError):
    pass


class BadBetas(SpecError):
    pass
