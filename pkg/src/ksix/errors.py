"""Exception hierarchy shared by all modules."""


class KSixError(Exception):
    """Base class for every error raised by the library."""


class DimensionMismatch(KSixError, ValueError):
    pass


class ParentMismatch(KSixError, ValueError):
    pass


class InfiniteGroup(KSixError, ValueError):
    pass


class NotWellDefined(KSixError, ValueError):
    """A matrix does not describe a homomorphism between the given groups."""


class NotExact(KSixError, ValueError):
    """A sequence of homomorphisms fails to be exact somewhere."""

    def __init__(self, spot, detail=""):
        self.spot = spot
        msg = f"not exact at {spot}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NotInImage(KSixError, ValueError):
    pass


class UnitIncompatible(KSixError, ValueError):
    pass


class PreconditionViolated(KSixError, ValueError):
    pass


class SoundnessFailure(KSixError, AssertionError):
    """An internal invariant of the library was found violated."""
