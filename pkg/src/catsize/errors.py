"""Exception types shared across the package."""


class CatSizeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CatSizeError):
    """A parameter is outside the domain where a quantity is defined.

    Raised e.g. for delta outside (0, 1/2), negative mode counts, or a
    confusability target that no integer block size can reach.
    """


class SizingError(CatSizeError):
    """A requested construction would exceed the configured memory caps."""


class TruncationError(CatSizeError):
    """A truncated Fock representation is too coarse for the request.

    Carries the offending tail mass and the cutoff that produced it so
    callers can retry with a larger basis.
    """

    def __init__(self, message, tail_mass=None, cutoff=None):
        super().__init__(message)
        self.tail_mass = tail_mass
        self.cutoff = cutoff


class ResolutionError(DomainError):
    """A phase-space grid is too coarse to resolve the requested feature.

    A subclass of DomainError: the grid parameters are outside the domain
    where feature extraction is meaningful.
    """
