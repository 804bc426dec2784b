"""Curvature estimation for curves and surfaces sampled as point clouds."""

from .bounds import BoundResult, Formula, curve_bound, generic_pair_bound, oracle_min_m, radicand_positive, surface_bound
from .curve import CurveEstimate, estimate_curve_curvature, estimate_curve_curvature_unchecked
from .errors import (
    CloudCurvError,
    DegenerateNormal,
    DegeneratePair,
    DegenerateTriple,
    DimensionError,
    DomainError,
    EmptyConjugateSet,
    EmptyNeighborhood,
    EmptyScoreSet,
    EstimationError,
    InsufficientSamples,
    NoBracketingPair,
    NonSmoothPointError,
    OffShapeError,
    QuadratureError,
)
from .geometry import PointCloud, circumradius, distance, menger_curvature, opposite_side_test, radius_query
from .shapes import (
    CURVES,
    SURFACES,
    curve_curvature_oracle,
    curve_length,
    curve_probes,
    get_shape,
    sample_curve_uniform,
    sample_surface_uniform,
    surface_area,
    surface_curvature_oracle,
    surface_probes,
)
from .surface import (
    SurfaceEstimate,
    conjugate_set,
    estimate_surface_curvature,
    principal_curvature_1,
    principal_curvature_2,
)

__version__ = "0.1.0"
