"""Exception hierarchy shared by all modules."""


class TripermError(Exception):
    pass


class ParseError(TripermError, ValueError):
    pass


class RingError(TripermError, ValueError):
    """Invalid ring spec, mixed rings, or an operation undefined for the ring."""


class CapExceeded(TripermError):
    """An enumeration would exceed its configured size cap."""


class MembershipViolation(TripermError, ValueError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"component {index}: {reason}")
        self.index = index
        self.reason = reason


class NotTriangular(TripermError, ValueError):
    pass


class NotAUnit(TripermError, ValueError):
    pass


class ActionError(TripermError, ValueError):
    """A proposed action is not by endomorphisms, or not a homomorphism."""
