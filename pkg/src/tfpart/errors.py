"""Exception types shared across the package."""

from __future__ import annotations


class TfpartError(Exception):
    """Base class for all errors raised by tfpart."""


class GuardExceeded(TfpartError):
    """An input is larger than the configured size guard of an exact routine."""


class OverlappingSets(TfpartError, ValueError):
    pass


class BadSizes(TfpartError, ValueError):
    pass


class InfeasibleSpec(TfpartError, ValueError):
    pass


class DegreeTooLarge(TfpartError, ValueError):
    pass


class BadAlpha(TfpartError, ValueError):
    pass


class NotTriangleFree(TfpartError, ValueError):
    pass


class PatternTooLarge(TfpartError, ValueError):
    pass


class AnchorMismatch(TfpartError, ValueError):
    pass


class InfeasibleAnchor(TfpartError, ValueError):
    pass


class UnknownInequality(TfpartError, KeyError):
    pass


class UnknownClaim(TfpartError, KeyError):
    pass


class Graph6Error(TfpartError, ValueError):
    pass
