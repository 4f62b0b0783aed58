"""
Scene documents: the JSON description of spaces, anchors, points,
constructed functions and tasks consumed by the command line.

Parsing validates the document with pydantic models, resolves every name and
builds the live objects (SigmaSpace, SparsePoints, ConstructedFunctions).
Every failure surfaces as a SceneError with a code and a dotted path.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Type

from pydantic import BaseModel, Field, PydanticValueError, ValidationError, root_validator, validator

from src.constructions.ball_product import BallProduct, NearlyOpenUnion, Radii
from src.constructions.functions import (
    ALGEBRA_OPS,
    PROFILES,
    ConstructedFunction,
    FunctionKind,
    algebra,
    build_thm52,
    build_thm53,
    component_indicator,
    coordinate_function,
    series,
)
from src.sigma.errors import SigmaError
from src.sigma.space import ZERO_ANCHOR, Anchor, CoordSpace, NormKind, SigmaSpace, SpaceFamily, SparsePoint
from src.utils.config import get_settings
from src.utils.logger import setup_logger

logger = setup_logger(__name__)


class SceneErrorCode(str, Enum):
    SCHEMA_VIOLATION = "SCHEMA_VIOLATION"
    RADIUS_NONPOSITIVE = "RADIUS_NONPOSITIVE"
    UNRESOLVED_REF = "UNRESOLVED_REF"
    DIMENSION_MISMATCH = "DIMENSION_MISMATCH"


class SceneError(Exception):
    """A scene document could not be loaded."""

    def __init__(self, code: SceneErrorCode, path: str, message: str):
        self.code = SceneErrorCode(code)
        self.path = path
        self.message = message
        super().__init__(f"{self.code.value} at {path or '<root>'}: {message}")


# Error types raised from validators; their codes select the SceneErrorCode.

class RadiusNonpositiveError(PydanticValueError):
    code = "radius_nonpositive"
    msg_template = "radius must be positive and finite, got {value}"


class UnresolvedRefError(PydanticValueError):
    code = "unresolved_ref"
    msg_template = "unknown {ref_kind} {ref!r}"


class DimensionMismatchValueError(PydanticValueError):
    code = "dimension_mismatch"
    msg_template = "index {index} takes {expected} entries, got {actual}"


class SceneStructureError(PydanticValueError):
    code = "scene_structure"
    msg_template = "{reason}"


_CODE_BY_TYPE = {
    "value_error." + RadiusNonpositiveError.code: SceneErrorCode.RADIUS_NONPOSITIVE,
    "value_error." + UnresolvedRefError.code: SceneErrorCode.UNRESOLVED_REF,
    "value_error." + DimensionMismatchValueError.code: SceneErrorCode.DIMENSION_MISMATCH,
}


# Document models

Coordinates = Dict[int, List[float]]


def _check_radius(v: float) -> float:
    if not (v > 0.0 and v < float("inf")):
        raise RadiusNonpositiveError(value=v)
    return v


class CoordSpaceModel(BaseModel):
    dim: int = Field(1, ge=1)
    norm: NormKind = NormKind.L2


class SpacesModel(BaseModel):
    prefix: List[CoordSpaceModel] = []
    tail: CoordSpaceModel = CoordSpaceModel()

    def family(self) -> SpaceFamily:
        return SpaceFamily(prefix=tuple(CoordSpace(s.dim, s.norm) for s in self.prefix),
                           tail=CoordSpace(self.tail.dim, self.tail.norm))


class AnchorModel(BaseModel):
    id: str
    values: Coordinates = {}

    @validator("values")
    def check_indices(cls, v):
        if any(n < 1 for n in v):
            raise ValueError("coordinate indices start at 1")
        return v


class PointModel(BaseModel):
    anchor: str = ZERO_ANCHOR
    overrides: Coordinates = {}

    @validator("overrides")
    def check_indices(cls, v):
        if any(n < 1 for n in v):
            raise ValueError("coordinate indices start at 1")
        return v


class RadiiModel(BaseModel):
    prefix: List[float] = []
    tail: float = 1.0

    @validator("prefix", each_item=True)
    def check_prefix(cls, v):
        return _check_radius(v)

    @validator("tail")
    def check_tail(cls, v):
        return _check_radius(v)

    def radii(self) -> Radii:
        return Radii(tuple(self.prefix), self.tail)


class BallProductModel(BaseModel):
    """center names a point; without one the ball product is centred at the anchor."""
    center: Optional[str] = None
    anchor: str = ZERO_ANCHOR
    radii: RadiiModel = RadiiModel()


class Thm52Model(BaseModel):
    kind: FunctionKind = Field(FunctionKind.THM52, const=True)
    ball_product: BallProductModel


class Thm53Model(BaseModel):
    kind: FunctionKind = Field(FunctionKind.THM53_UNION, const=True)
    members: List[BallProductModel] = Field(..., min_items=1)


class IndicatorModel(BaseModel):
    kind: FunctionKind = Field(FunctionKind.COMPONENT_INDICATOR, const=True)
    x0: Optional[str] = None
    y1: float = 0.0
    y2: float = 1.0


class AlgebraModel(BaseModel):
    kind: FunctionKind = Field(FunctionKind.ALGEBRA, const=True)
    op: str
    children: List[str] = Field(..., min_items=1)

    @validator("op")
    def check_op(cls, v):
        if v not in ALGEBRA_OPS:
            raise ValueError(f"unknown operation {v!r}")
        return v


class SeriesModel(BaseModel):
    kind: FunctionKind = Field(FunctionKind.SERIES, const=True)
    weights: List[float] = Field(..., min_items=1)
    children: List[str] = Field(..., min_items=1)
    tail_bound: float = Field(0.0, ge=0.0)

    @root_validator(skip_on_failure=True)
    def check_lengths(cls, values):
        if len(values["weights"]) != len(values["children"]):
            raise ValueError("a series needs one weight per child")
        return values


class CoordinateModel(BaseModel):
    kind: FunctionKind = Field(FunctionKind.COORDINATE, const=True)
    profile: str
    indices: List[int] = [1]

    @validator("profile")
    def check_profile(cls, v):
        if v not in PROFILES:
            raise ValueError(f"unknown profile {v!r}")
        return v

    @validator("indices")
    def check_indices(cls, v):
        if not v or min(v) < 1:
            raise ValueError("indices must be a nonempty list of integers >= 1")
        return v


FUNCTION_MODELS: Dict[FunctionKind, Type[BaseModel]] = {
    FunctionKind.THM52: Thm52Model,
    FunctionKind.THM53_UNION: Thm53Model,
    FunctionKind.COMPONENT_INDICATOR: IndicatorModel,
    FunctionKind.ALGEBRA: AlgebraModel,
    FunctionKind.SERIES: SeriesModel,
    FunctionKind.COORDINATE: CoordinateModel,
}


class FunctionSpec:
    """Tagged function description: the `kind` field selects the model."""

    @classmethod
    def __get_validators__(cls):
        yield cls.validate

    @classmethod
    def validate(cls, v):
        if isinstance(v, tuple(FUNCTION_MODELS.values())):
            return v
        if not isinstance(v, dict):
            raise TypeError("function descriptions are JSON objects")
        try:
            kind = FunctionKind(v.get("kind"))
        except ValueError:
            raise ValueError(f"unknown function kind {v.get('kind')!r}") from None
        return FUNCTION_MODELS[kind].parse_obj(v)


class TaskKind(str, Enum):
    EVAL = "eval"
    SSC = "ssc"
    SEP = "sep"
    CRITERION = "criterion"
    SCONT = "scont"
    NEARLY_OPEN = "nearly-open"
    SYMMETRIC = "symmetric"
    WITNESS = "witness"
    OSCILLATION = "oscillation"
    LSC = "lsc"
    CLAIM4 = "claim4"
    BUILD = "build"
    SLICE = "slice"
    VERIFY = "verify"


_NEEDS_FUNCTION = frozenset(TaskKind) - {TaskKind.VERIFY}
_NEEDS_POINT = frozenset({TaskKind.EVAL, TaskKind.SSC, TaskKind.SEP, TaskKind.CRITERION, TaskKind.SYMMETRIC,
                          TaskKind.WITNESS, TaskKind.OSCILLATION, TaskKind.LSC, TaskKind.CLAIM4,
                          TaskKind.SLICE})


class TaskModel(BaseModel):
    kind: TaskKind
    name: Optional[str] = None
    function: Optional[str] = None
    point: Optional[str] = None
    params: Dict[str, Any] = {}
    seed: Optional[int] = None

    @root_validator(skip_on_failure=True)
    def check_refs_present(cls, values):
        kind = values["kind"]
        if kind in _NEEDS_FUNCTION and not values.get("function"):
            raise SceneStructureError(reason=f"task {kind.value!r} needs a function")
        if kind in _NEEDS_POINT and not values.get("point"):
            raise SceneStructureError(reason=f"task {kind.value!r} needs a point")
        return values

    @property
    def label(self) -> str:
        return self.name or ":".join(p for p in (self.kind.value, self.function, self.point) if p)


def _default_seed() -> int:
    return get_settings().DEFAULT_SEED


class SceneDocument(BaseModel):
    """The validated JSON document; references are checked but not built."""
    version: int = 1
    seed: int = Field(default_factory=_default_seed)
    spaces: SpacesModel = SpacesModel()
    anchors: List[AnchorModel] = []
    points: Dict[str, PointModel] = {}
    constructions: Dict[str, FunctionSpec] = {}
    tasks: List[TaskModel] = []

    @root_validator(skip_on_failure=True)
    def check_references(cls, values):
        family = values["spaces"].family()
        anchor_ids = {ZERO_ANCHOR}
        for i, anchor in enumerate(values["anchors"]):
            if anchor.id in anchor_ids:
                raise SceneStructureError(reason=f"anchor id {anchor.id!r} is reserved or repeated",
                                          path=f"anchors.{i}.id")
            _check_dims(family, anchor.values, f"anchors.{i}.values")
            anchor_ids.add(anchor.id)

        points = values["points"]
        for name, p in points.items():
            _require(p.anchor in anchor_ids, "anchor", p.anchor, f"points.{name}.anchor")
            _check_dims(family, p.overrides, f"points.{name}.overrides")

        functions = values["constructions"]
        for name, spec in functions.items():
            path = f"constructions.{name}"
            members = []
            if isinstance(spec, Thm52Model):
                members = [(spec.ball_product, f"{path}.ball_product")]
            elif isinstance(spec, Thm53Model):
                members = [(bp, f"{path}.members.{j}") for j, bp in enumerate(spec.members)]
            elif isinstance(spec, IndicatorModel) and spec.x0 is not None:
                _require(spec.x0 in points, "point", spec.x0, f"{path}.x0")
            elif isinstance(spec, (AlgebraModel, SeriesModel)):
                for j, child in enumerate(spec.children):
                    _require(child in functions, "function", child, f"{path}.children.{j}")
            for bp, bp_path in members:
                if bp.center is not None:
                    _require(bp.center in points, "point", bp.center, f"{bp_path}.center")
                else:
                    _require(bp.anchor in anchor_ids, "anchor", bp.anchor, f"{bp_path}.anchor")
        _check_acyclic(functions)

        for i, task in enumerate(values["tasks"]):
            if task.function is not None:
                _require(task.function in functions, "function", task.function, f"tasks.{i}.function")
            if task.point is not None:
                _require(task.point in points, "point", task.point, f"tasks.{i}.point")
        return values


def _require(ok: bool, ref_kind: str, ref: str, path: str) -> None:
    if not ok:
        raise UnresolvedRefError(ref_kind=ref_kind, ref=ref, path=path)


def _check_dims(family: SpaceFamily, coords: Coordinates, path: str) -> None:
    for n, v in coords.items():
        expected = family.space(n).dim
        if len(v) != expected:
            raise DimensionMismatchValueError(index=n, expected=expected, actual=len(v), path=f"{path}.{n}")


def _check_acyclic(functions: Dict[str, Any]) -> None:
    state: Dict[str, int] = {}

    def visit(name: str) -> None:
        if state.get(name) == 2:
            return
        if state.get(name) == 1:
            raise SceneStructureError(reason=f"construction {name!r} refers to itself",
                                      path=f"constructions.{name}")
        state[name] = 1
        for child in getattr(functions[name], "children", []):
            visit(child)
        state[name] = 2

    for name in functions:
        visit(name)


# Live scene

@dataclass
class Scene:
    """A parsed document plus the objects it describes. Equality compares documents."""
    document: SceneDocument
    space: SigmaSpace = field(compare=False)
    points: Dict[str, SparsePoint] = field(compare=False, default_factory=dict)
    functions: Dict[str, ConstructedFunction] = field(compare=False, default_factory=dict)

    @property
    def tasks(self) -> List[TaskModel]:
        return self.document.tasks

    def point(self, name: str) -> SparsePoint:
        return self.points[name]

    def function(self, name: str) -> ConstructedFunction:
        return self.functions[name]


def _ball_product(space: SigmaSpace, points: Dict[str, SparsePoint], model: BallProductModel) -> BallProduct:
    center = points[model.center] if model.center is not None else space.base_point(model.anchor)
    return BallProduct(center, model.radii.radii())


FunctionBuilder = Callable[[SigmaSpace, Dict[str, SparsePoint], Any, str, Callable[[str], ConstructedFunction]],
                           ConstructedFunction]

BUILDERS: Dict[FunctionKind, FunctionBuilder] = {
    FunctionKind.THM52: lambda space, points, m, name, ref: build_thm52(
        space, _ball_product(space, points, m.ball_product), name),
    FunctionKind.THM53_UNION: lambda space, points, m, name, ref: build_thm53(
        space, NearlyOpenUnion(tuple(_ball_product(space, points, bp) for bp in m.members)), name),
    FunctionKind.COMPONENT_INDICATOR: lambda space, points, m, name, ref: component_indicator(
        space, points[m.x0] if m.x0 is not None else space.base_point(ZERO_ANCHOR), m.y1, m.y2, name),
    FunctionKind.ALGEBRA: lambda space, points, m, name, ref: algebra(
        space, m.op, [ref(c) for c in m.children], name),
    FunctionKind.SERIES: lambda space, points, m, name, ref: series(
        space, m.weights, [ref(c) for c in m.children], m.tail_bound, name),
    FunctionKind.COORDINATE: lambda space, points, m, name, ref: coordinate_function(
        space, m.profile, m.indices, name),
}


def build_scene(document: SceneDocument) -> Scene:
    """Instantiate the objects of a validated document. Each call builds a fresh space."""
    path = "spaces"
    try:
        space = SigmaSpace(document.spaces.family())
        for i, anchor in enumerate(document.anchors):
            path = f"anchors.{i}"
            space.register_anchor(Anchor(anchor.id, anchor.values))
        points = {}
        for name, p in document.points.items():
            path = f"points.{name}"
            points[name] = space.point(p.anchor, p.overrides)

        functions: Dict[str, ConstructedFunction] = {}

        def ref(name: str) -> ConstructedFunction:
            if name not in functions:
                model = document.constructions[name]
                functions[name] = BUILDERS[model.kind](space, points, model, name, ref)
            return functions[name]

        for name in document.constructions:
            path = f"constructions.{name}"
            ref(name)
    except (SigmaError, ValueError) as e:
        raise SceneError(SceneErrorCode.SCHEMA_VIOLATION, path, str(e)) from e
    return Scene(document, space, points, functions)


def _scene_error(exc: ValidationError) -> SceneError:
    errors = exc.errors()
    chosen = next((e for e in errors if e["type"] in _CODE_BY_TYPE), errors[0])
    code = _CODE_BY_TYPE.get(chosen["type"], SceneErrorCode.SCHEMA_VIOLATION)
    ctx = chosen.get("ctx") or {}
    path = ctx.get("path") or ".".join(str(p) for p in chosen["loc"] if p != "__root__")
    return SceneError(code, path, chosen["msg"])


def parse_document(data: Dict[str, Any]) -> SceneDocument:
    try:
        return SceneDocument.parse_obj(data)
    except ValidationError as e:
        raise _scene_error(e) from e


def parse_scene(text: str) -> Scene:
    """
    Parse and build a scene from JSON text.

    Raises:
        SceneError: With code SCHEMA_VIOLATION, RADIUS_NONPOSITIVE,
            UNRESOLVED_REF or DIMENSION_MISMATCH and the offending path.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SceneError(SceneErrorCode.SCHEMA_VIOLATION, f"line {e.lineno}", e.msg) from e
    if not isinstance(data, dict):
        raise SceneError(SceneErrorCode.SCHEMA_VIOLATION, "", "a scene is a JSON object")
    scene = build_scene(parse_document(data))
    logger.debug(f"Parsed scene: {len(scene.points)} points, {len(scene.functions)} functions, "
                 f"{len(scene.tasks)} tasks")
    return scene


def emit_scene(scene: Scene) -> str:
    """Canonical JSON text of the scene's document; parse_scene(emit_scene(s)) == s."""
    return scene.document.json(indent=2, sort_keys=True) + "\n"
