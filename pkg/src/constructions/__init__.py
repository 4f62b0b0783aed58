"""
Builders and evaluators for strongly separately continuous functions.
"""
from src.constructions.ball_product import BallProduct, NearlyOpenUnion, Radii, ball_product_from_radii
from src.constructions.functions import (
    ComponentIndicator,
    ConstructedFunction,
    CoordinateFunction,
    FunctionKind,
    RegionTag,
    Thm52Function,
    Thm53Function,
    algebra,
    build_thm52,
    build_thm53,
    classify_region,
    component_indicator,
    coordinate_function,
    evaluate,
    evaluate_g,
    h_inverse,
    h_transform,
    series,
)
from src.constructions.radii import radii_extension

__all__ = [
    "BallProduct",
    "NearlyOpenUnion",
    "Radii",
    "ball_product_from_radii",
    "ComponentIndicator",
    "ConstructedFunction",
    "CoordinateFunction",
    "FunctionKind",
    "RegionTag",
    "Thm52Function",
    "Thm53Function",
    "algebra",
    "build_thm52",
    "build_thm53",
    "classify_region",
    "component_indicator",
    "coordinate_function",
    "evaluate",
    "evaluate_g",
    "h_inverse",
    "h_transform",
    "series",
    "radii_extension",
]
