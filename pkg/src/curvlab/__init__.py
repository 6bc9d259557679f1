"""Sectional curvature of Lie groups, homogeneous spaces and biquotients."""
from .liealg import LieAlgebraBasis, Subalgebra, bracket, build_algebra, named_subalgebra
from .metric import LeftInvariantMetric, cheeger_deform, sectional_curvature, subalgebra_scaled
from .optimize import Budget, CurvatureExtrema, min_sectional, optimize_family, pinching

__all__ = [
    "Budget", "CurvatureExtrema", "LeftInvariantMetric", "LieAlgebraBasis", "Subalgebra", "bracket",
    "build_algebra", "cheeger_deform", "min_sectional", "named_subalgebra", "optimize_family", "pinching",
    "sectional_curvature", "subalgebra_scaled",
]
