"""Exception types shared across the package."""


class WrightFisherError(Exception):
    """Base class for all model-specific failures."""


class ZeroMeanFitness(WrightFisherError):
    """The normalizing mean fitness vanished; the regression map is undefined."""


class DegenerateNormalizer(ZeroMeanFitness):
    """The equilibrium-form normalizer dropped to (or below) zero."""


class DegenerateModel(ZeroMeanFitness):
    """Exact-arithmetic normalizer is identically zero at the given state."""


class SingularDirectionMatrix(WrightFisherError):
    """The direction matrix is (numerically) singular; no equilibrium solve."""


class InadmissibleEquilibrium(WrightFisherError):
    """The solved equilibrium has a non-positive component: no interior fixed point."""


class OutOfRangeDirection(WrightFisherError):
    """A derived direction parameter falls outside the admissible [0, 1] range."""


class NotDiagonalModel(WrightFisherError):
    """The requested representation is exact only for diagonal direction matrices."""


class NonFiniteIterate(WrightFisherError):
    """An iterate left the simplex by more than the permitted rounding slack."""


class NoSignChange(WrightFisherError):
    """Root bracketing failed: the drift does not change sign on the interval."""


class ModelFormatError(WrightFisherError):
    """A model file failed to parse or violated the schema."""
