"""Exception hierarchy shared by the loaders, partitioners and CLI."""


class CrossmapError(Exception):
    """Base class for all errors raised by crossmap."""


class GraphFormatError(CrossmapError, ValueError):
    """A graph or mapping file could not be parsed."""


class GraphValidationError(CrossmapError, ValueError):
    """A graph parsed correctly but violates a structural invariant."""


class InfeasibleError(CrossmapError, ValueError):
    """The workload does not fit on the hardware (n > k * s)."""


class InstanceTooLargeError(CrossmapError, ValueError):
    """An exhaustive oracle was asked to enumerate beyond its cap."""
