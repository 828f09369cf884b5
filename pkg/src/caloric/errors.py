"""Exception types shared across the toolkit."""


class CaloricError(Exception):
    """Base class for all toolkit-specific failures."""


class DomainTooSmallError(CaloricError):
    """The spatial grid does not cover the region a computation needs."""


class InsufficientResolutionError(CaloricError):
    """Too few samples (in time or space) to carry out a measurement."""


class InsufficientDecayDataError(CaloricError):
    """Too few usable annuli survive the resolution cut for a decay fit."""


class CoverageError(CaloricError):
    """A Carleson box or probe region is not covered by the sampled field."""


class DataError(CaloricError):
    """Field data violates an invariant (non-finite values, bad shape)."""


class InvariantViolationError(CaloricError):
    """A mathematical invariant failed; signals a quadrature or logic bug."""
