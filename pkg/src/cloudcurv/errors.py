"""Exception types raised across the package."""


class CloudCurvError(Exception):
    """Base class for all package errors."""


class DimensionError(CloudCurvError, ValueError):
    pass


class DomainError(CloudCurvError, ValueError):
    pass


class DegenerateTriple(CloudCurvError, ValueError):
    pass


class DegeneratePair(CloudCurvError, ValueError):
    pass


class QuadratureError(CloudCurvError, RuntimeError):
    pass


class OffShapeError(CloudCurvError, ValueError):
    pass


class NonSmoothPointError(CloudCurvError, ValueError):
    pass


class InsufficientSamples(CloudCurvError):
    """The cloud is smaller than the sample-size bound requires."""

    def __init__(self, required, provided, bound=None):
        self.required = int(required)
        self.provided = int(provided)
        self.bound = bound
        super().__init__(
            f"cloud has {self.provided} points but at least {self.required} are required"
        )


class EstimationError(CloudCurvError):
    """An estimator could not find the witnesses it needs in this cloud."""


class NoBracketingPair(EstimationError):
    pass


class EmptyNeighborhood(EstimationError):
    pass


class EmptyConjugateSet(EstimationError):
    pass


class EmptyScoreSet(EstimationError):
    pass


class DegenerateNormal(EstimationError):
    pass
