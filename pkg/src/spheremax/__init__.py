"""Numerical laboratory for multilinear spherical maximal averages on the line."""

from spheremax.counterexamples import (
    LemmaReport,
    ResolutionGuardError,
    ScalingReport,
    cex_bilinear_L2,
    cex_condition_a,
    cex_condition_b,
    cex_corner,
    cex_H,
    cex_Hi,
    lemma_check,
)
from spheremax.funcspec import Constant, FunctionSpec, Indicator, PowerLog, PowerLogTail
from spheremax.operators import (
    DominationReport,
    MaxEstimate,
    TGrid,
    ball_average,
    check_bilinear_domination,
    check_multilinear_domination,
    linear_spherical_max,
    multilinear_hl_max,
    spherical_average,
    spherical_maximal,
)
from spheremax.region import (
    Classification,
    ConditionReport,
    ExponentPoint,
    RegionFigure,
    Verdict,
    check_conditions,
    classify,
    region_figure,
    sample_region,
)
from spheremax.sphere import (
    ResourceLimitError,
    build_ball_rule,
    build_circle_rule,
    build_interval_rule,
    build_sphere_rule,
    mc_ball_integral,
    mc_sphere_integral,
    refine,
)

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "ConditionReport",
    "Constant",
    "DominationReport",
    "ExponentPoint",
    "FunctionSpec",
    "Indicator",
    "LemmaReport",
    "MaxEstimate",
    "PowerLog",
    "PowerLogTail",
    "RegionFigure",
    "ResolutionGuardError",
    "ResourceLimitError",
    "ScalingReport",
    "TGrid",
    "Verdict",
    "ball_average",
    "build_ball_rule",
    "build_circle_rule",
    "build_interval_rule",
    "build_sphere_rule",
    "cex_H",
    "cex_Hi",
    "cex_bilinear_L2",
    "cex_condition_a",
    "cex_condition_b",
    "cex_corner",
    "check_bilinear_domination",
    "check_conditions",
    "check_multilinear_domination",
    "classify",
    "lemma_check",
    "linear_spherical_max",
    "mc_ball_integral",
    "mc_sphere_integral",
    "multilinear_hl_max",
    "refine",
    "region_figure",
    "sample_region",
    "spherical_average",
    "spherical_maximal",
    "__version__",
]
