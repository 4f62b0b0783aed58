"""
Sigma-products of finite-dimensional normed spaces: sparse points, traces and
S-topology probes.
"""
from src.sigma.errors import (
    AnchorLookupError,
    AnchorMismatchError,
    DimensionMismatchError,
    EmptyUnionError,
    InfeasibleGridError,
    NotNearlyOpenError,
    PreconditionError,
    SigmaError,
)
from src.sigma.space import (
    INFINITE,
    ZERO_ANCHOR,
    Anchor,
    BoxNeighborhood,
    CoordSpace,
    NormKind,
    SigmaSpace,
    SpaceFamily,
    SparsePoint,
    dist_to_unit_sphere,
    norm,
    random_unit_vector,
)
from src.sigma.verdicts import Certainty, Status, severity

__all__ = [
    "AnchorLookupError",
    "AnchorMismatchError",
    "DimensionMismatchError",
    "EmptyUnionError",
    "InfeasibleGridError",
    "NotNearlyOpenError",
    "PreconditionError",
    "SigmaError",
    "INFINITE",
    "ZERO_ANCHOR",
    "Anchor",
    "BoxNeighborhood",
    "CoordSpace",
    "NormKind",
    "SigmaSpace",
    "SpaceFamily",
    "SparsePoint",
    "dist_to_unit_sphere",
    "norm",
    "random_unit_vector",
    "Certainty",
    "Status",
    "severity",
]
