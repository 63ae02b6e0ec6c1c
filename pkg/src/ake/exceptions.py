"""Exception types shared across the library."""


class AkeError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatch(AkeError, ValueError):
    """Operands have incompatible shapes."""


class NumericalFailure(AkeError, RuntimeError):
    """A dense linear-algebra routine could not produce a usable result."""


class NotSymmetric(AkeError, ValueError):
    """A matrix required to be symmetric is not."""


class NonBinaryInput(AkeError, ValueError):
    """Tanimoto kernel inputs must contain only 0/1 entries."""


class UnresolvedSigma(AkeError, ValueError):
    """A Gaussian bandwidth is still 'auto' where a number is required."""


class DegenerateData(AkeError, ValueError):
    """The data cannot support the requested operation (too few or
    coincident samples)."""


class UnsupportedKernel(AkeError, ValueError):
    """The kernel family cannot be used in this role (e.g. a
    non-differentiable latent kernel)."""


class NonFiniteLoss(AkeError, RuntimeError):
    """The alignment optimization produced a NaN/Inf loss or gradient.

    Carries the per-iteration loss trace recorded up to the failure in
    the ``trace`` attribute.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class PrecomputedModeNeedsGram(AkeError, ValueError):
    """A model fitted on a precomputed kernel matrix cannot embed raw
    features; supply a cross-kernel block instead."""


class InsufficientRank(AkeError, RuntimeError):
    """The centered kernel matrix has fewer positive eigenvalues than the
    requested number of components."""


class SingleCluster(AkeError, ValueError):
    """Cluster validity indices need at least two clusters."""


class DegenerateClusters(AkeError, RuntimeError):
    """Two cluster centroids coincide; the index is undefined."""


class KOutOfRange(AkeError, ValueError):
    """Neighborhood size k outside the validity range 1 <= k < n/2."""


class ParseError(AkeError, ValueError):
    """A token in an input file could not be parsed; the message carries
    1-based row/column coordinates."""


class RaggedRows(ParseError):
    """Rows of an input file have inconsistent widths."""


class EmptyFile(ParseError):
    """The input file contains no data rows."""


class NonBinaryEntry(ParseError):
    """A fingerprint file contains a value other than 0 or 1."""


class InvalidRadii(AkeError, ValueError):
    """Circle radii must be positive and distinct."""


class ModelFormatError(AkeError, ValueError):
    """A model file is malformed or has an unsupported format version."""
