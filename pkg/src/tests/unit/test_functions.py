"""
Unit tests for the constructed functions.
"""
import math

import pytest

from src.constructions.ball_product import BallProduct, NearlyOpenUnion, Radii
from src.constructions.functions import (
    FunctionKind,
    RegionTag,
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
from src.sigma.errors import AnchorMismatchError, PreconditionError
from src.sigma.space import ZERO_ANCHOR, Anchor, BoxNeighborhood, CoordSpace, NormKind, SigmaSpace, SpaceFamily
from src.sigma.topology import PredicateTag


@pytest.mark.unit
class TestRegions:
    """Transformed coordinates and escape regions."""

    def test_classify(self, line_space):
        """The first coordinate with norm >= 1 names the region."""
        z = line_space.point(ZERO_ANCHOR, {1: [0.5], 2: [1.0], 3: [4.0]})
        assert classify_region(line_space, z) == RegionTag(2)
        assert str(classify_region(line_space, z)) == "ESCAPE(2)"
        assert classify_region(line_space, line_space.point(ZERO_ANCHOR, {5: [0.99]})).inside

    @pytest.mark.parametrize("coords,expected", [
        ({1: [3.0]}, 2.0),
        ({1: [0.2], 2: [1.6]}, 0.6),
        ({1: [0.9], 2: [1.6]}, 0.1),
        ({1: [0.3], 4: [1.0]}, 0.0),
        ({1: [0.5]}, 0.0),
    ])
    def test_evaluate_g(self, line_space, coords, expected):
        """g is the distance of the leading coordinates to the unit spheres on ESCAPE(n)."""
        z = line_space.point(ZERO_ANCHOR, coords)
        assert evaluate_g(line_space, z) == pytest.approx(expected)

    def test_h_round_trip(self, line_space):
        """h_inverse undoes h_transform."""
        bp = BallProduct(line_space.point(ZERO_ANCHOR, {1: [1.0], 3: [-2.0]}), Radii((0.5, 2.0), 0.25))
        x = line_space.point(ZERO_ANCHOR, {1: [1.25], 2: [3.0], 4: [0.125]})
        z = h_transform(line_space, x, bp)
        assert z.anchor_id == ZERO_ANCHOR
        assert line_space.coordinate(z, 1) == pytest.approx((0.5,))
        assert line_space.coordinate(z, 3) == pytest.approx((8.0,))
        back = h_inverse(line_space, z, bp)
        for n in range(1, 6):
            assert line_space.coordinate(back, n) == pytest.approx(line_space.coordinate(x, n))

    def test_h_transform_anchor_checked(self, line_space):
        """h is defined on W's component only."""
        line_space.register_anchor(Anchor("b", {1: [1.0]}))
        bp = BallProduct(line_space.base_point(ZERO_ANCHOR), Radii())
        with pytest.raises(AnchorMismatchError):
            h_transform(line_space, line_space.base_point("b"), bp)


@pytest.mark.unit
class TestSingleBallProduct:
    """The single ball-product construction."""

    def test_zero_on_w(self, unit_f, line_space):
        """f vanishes on W, including its center."""
        assert evaluate(unit_f, line_space.base_point(ZERO_ANCHOR)) == 0.0
        assert unit_f(line_space.point(ZERO_ANCHOR, {1: [0.3], 2: [-0.4], 9: [0.99]})) == 0.0

    def test_clamped_at_one(self, unit_f, line_space):
        """min(|1 - 3|, 1) = 1 at x = (3, 0, ...)."""
        assert unit_f(line_space.point(ZERO_ANCHOR, {1: [3.0]})) == 1.0
        assert unit_f(line_space.point(ZERO_ANCHOR, {1: [0.2], 2: [1.6]})) == pytest.approx(0.6)

    def test_range(self, unit_f, line_space, rng):
        """Values stay in [0, 1]."""
        from src.analysis.sampling import random_point
        for _ in range(200):
            value = unit_f(random_point(line_space, ZERO_ANCHOR, rng, 6, 3.0))
            assert 0.0 <= value <= 1.0

    def test_rescaled_center(self):
        """Centers and radii are honoured through h."""
        space = SigmaSpace(SpaceFamily.uniform(2, NormKind.LINF))
        bp = BallProduct(space.point(ZERO_ANCHOR, {1: [1.0, 1.0]}), Radii((2.0,), 0.5))
        f = build_thm52(space, bp)
        assert f(space.point(ZERO_ANCHOR, {1: [2.5, 0.0]})) == 0.0
        # h(x)_1 = (0.5, 0), h(x)_2 = (2.4, 0): escape at 2, g = min(0.5, 1.4)
        assert f(space.point(ZERO_ANCHOR, {1: [2.0, 1.0], 2: [1.2, 0.0]})) == pytest.approx(0.5)

    def test_claimed_set(self, unit_f, line_space):
        """D(f) is the ball-product predicate of W."""
        claimed = unit_f.claimed_discontinuities()
        assert claimed.tag == PredicateTag.BALL_PRODUCT_UNION
        assert claimed(line_space.point(ZERO_ANCHOR, {1: [0.5]}))
        assert not claimed(line_space.point(ZERO_ANCHOR, {1: [1.5]}))
        assert unit_f.value_range() == (0.0, 1.0)

    def test_escape_witness(self, unit_f, line_space):
        """The witness at m + n takes the value rho."""
        u = line_space.point(ZERO_ANCHOR, {1: [0.3], 2: [-0.4]})
        rho, n = unit_f.escape_rho(u)
        assert (rho, n) == (pytest.approx(0.6), 2)
        x = unit_f.escape_witness(u, 3)
        assert x.support == (1, 2, 5)
        assert unit_f(x) == pytest.approx(rho)

    def test_escape_rho_outside_rejected(self, unit_f, line_space):
        """rho is defined on W only."""
        with pytest.raises(PreconditionError):
            unit_f.escape_rho(line_space.point(ZERO_ANCHOR, {1: [2.0]}))

    def test_witnesses_leave_box_constraints(self, unit_f, line_space):
        """Witnesses sit past the box's horizon."""
        u = line_space.base_point(ZERO_ANCHOR)
        box = BoxNeighborhood.around(u, 0.1, 4)
        (x,) = unit_f.witnesses(u, box)
        assert line_space.box_contains(box, x)
        assert unit_f(x) == 1.0

    def test_anchor_checked(self, unit_f, line_space):
        """Points over other anchors are rejected."""
        line_space.register_anchor(Anchor("b", {1: [1.0]}))
        with pytest.raises(AnchorMismatchError):
            unit_f(line_space.base_point("b"))


@pytest.mark.unit
class TestWeightedUnion:
    """Sums of 2^-m f_m over a finite union."""

    @pytest.fixture
    def g(self, line_space):
        union = NearlyOpenUnion((
            BallProduct(line_space.base_point(ZERO_ANCHOR), Radii.constant(1.0)),
            BallProduct(line_space.point(ZERO_ANCHOR, {1: [2.0]}), Radii((0.5, 0.5), 2.0)),
        ))
        return build_thm53(line_space, union, name="g")

    def test_exact_sum(self, g, line_space):
        """The value is the weighted sum of the children."""
        x = line_space.point(ZERO_ANCHOR, {1: [0.2], 2: [1.6]})
        expected = 0.5 * g.parts[0](x) + 0.25 * g.parts[1](x)
        assert g(x) == pytest.approx(expected)
        assert g.kind == FunctionKind.THM53_UNION

    def test_zero_on_members(self, g, line_space):
        """Points of the first member get at most the second child's weight."""
        x = line_space.point(ZERO_ANCHOR, {1: [0.1]})
        assert g.parts[0](x) == 0.0
        assert g(x) == pytest.approx(0.25 * g.parts[1](x))

    def test_truncation_bound(self, g, line_space, rng):
        """Dropping children after M' changes values by at most 2^-M'."""
        from src.analysis.sampling import random_point
        for _ in range(50):
            x = random_point(line_space, ZERO_ANCHOR, rng, 4, 3.0)
            for terms in range(3):
                assert abs(g(x) - g.partial_sum(x, terms)) <= 2.0 ** -terms

    def test_witnesses_in_overlapping_members(self, line_space):
        """In two members at once, each witness keeps at least its own member's share."""
        center = line_space.base_point(ZERO_ANCHOR)
        nested = build_thm53(line_space, NearlyOpenUnion((BallProduct(center, Radii.constant(1.0)),
                                                          BallProduct(center, Radii.constant(2.0)))))
        u = line_space.point(ZERO_ANCHOR, {1: [0.3]})
        assert nested(u) == 0.0
        witnesses = nested.witnesses(u, BoxNeighborhood.around(u, 0.1, 3))
        assert len(witnesses) == 2
        for m, (part, x) in enumerate(zip(nested.parts, witnesses), start=1):
            rho, _ = part.escape_rho(u)
            assert part(x) == pytest.approx(rho)
            assert nested(x) >= 2.0 ** -m * rho - 1e-12

    def test_range_and_children(self, g):
        """Range is [0, 1 - 2^-M]."""
        assert g.value_range() == (0.0, 0.75)
        assert len(g.children) == 2
        assert g.describe()["members"] == 2


@pytest.mark.unit
class TestOtherFunctions:
    """Component indicators, algebra, series and coordinate profiles."""

    def test_component_indicator(self, mixed_space):
        """y1 on the component of x0, y2 elsewhere."""
        f = component_indicator(mixed_space, mixed_space.base_point(ZERO_ANCHOR), 2.0, 5.0)
        assert f(mixed_space.point(ZERO_ANCHOR, {4: [9.0]})) == 2.0
        assert f(mixed_space.base_point("shifted")) == 5.0
        assert f.value_range() == (2.0, 5.0)
        assert f.anchor_id is None

    def test_indicator_witnesses_cross_components(self, mixed_space):
        """Witnesses lie in the box but in another component."""
        f = component_indicator(mixed_space, mixed_space.base_point(ZERO_ANCHOR))
        u = mixed_space.point(ZERO_ANCHOR, {3: [0.5]})
        box = BoxNeighborhood.around(u, 0.01, 3)
        (x,) = f.witnesses(u, box)
        assert x.anchor_id == "shifted"
        assert mixed_space.box_contains(box, x)
        assert abs(f(x) - f(u)) == 1.0

    def test_algebra(self, line_space, unit_f):
        """Pointwise operations on children."""
        norm1 = coordinate_function(line_space, "norm", [1])
        x = line_space.point(ZERO_ANCHOR, {1: [-3.0]})
        assert algebra(line_space, "add", [norm1, unit_f])(x) == pytest.approx(4.0)
        assert algebra(line_space, "sub", [norm1, unit_f])(x) == pytest.approx(2.0)
        assert algebra(line_space, "mul", [norm1, unit_f])(x) == pytest.approx(3.0)
        assert algebra(line_space, "neg", [norm1])(x) == -3.0
        assert algebra(line_space, "abs", [algebra(line_space, "neg", [norm1])])(x) == 3.0
        assert algebra(line_space, "min", [norm1, unit_f])(x) == 1.0
        assert algebra(line_space, "max", [norm1, unit_f])(x) == 3.0

    @pytest.mark.parametrize("op,count", [("abs", 2), ("sub", 1), ("pow", 2), ("add", 0)])
    def test_algebra_arity(self, line_space, unit_f, op, count):
        """Unknown operations and wrong operand counts are rejected."""
        with pytest.raises(ValueError):
            algebra(line_space, op, [unit_f] * count)

    def test_series(self, line_space, unit_f):
        """Finite weighted sums with a declared tail bound."""
        ind = component_indicator(line_space, line_space.base_point(ZERO_ANCHOR), 0.0, 1.0)
        f = series(line_space, [0.5, 0.25], [unit_f, ind], tail_bound=0.125)
        x = line_space.point(ZERO_ANCHOR, {1: [3.0]})
        assert f(x) == pytest.approx(0.5)
        assert f.truncation_bound(1) == pytest.approx(0.25 + 0.125)
        assert f.truncation_bound(2) == pytest.approx(0.125)

    def test_series_validation(self, line_space, unit_f):
        """One weight per child and a nonnegative tail bound."""
        with pytest.raises(ValueError):
            series(line_space, [1.0, 2.0], [unit_f])
        with pytest.raises(ValueError):
            series(line_space, [1.0], [unit_f], tail_bound=-1.0)

    @pytest.mark.parametrize("profile,indices,expected", [
        ("norm", [1], 5.0),
        ("sum_norms", [1, 2], 6.0),
        ("product", [1, 2], 3.0),
        ("max_norm", [1, 2, 3], 5.0),
        ("nonzero", [3], 0.0),
        ("sphere_step", [2], 1.0),
    ])
    def test_coordinate_profiles(self, profile, indices, expected):
        """Profiles read the listed coordinates only."""
        space = SigmaSpace(SpaceFamily(prefix=(CoordSpace(2, NormKind.L2),), tail=CoordSpace(1)))
        x = space.point(ZERO_ANCHOR, {1: [3.0, 4.0], 2: [1.0], 7: [100.0]})
        assert coordinate_function(space, profile, indices)(x) == pytest.approx(expected)

    def test_coordinate_claimed_sets(self, line_space):
        """Continuous profiles claim nothing; steps claim their jump set."""
        assert coordinate_function(line_space, "norm").claimed_discontinuities()(
            line_space.base_point(ZERO_ANCHOR)) is False
        step = coordinate_function(line_space, "sphere_step", [1]).claimed_discontinuities()
        assert step(line_space.point(ZERO_ANCHOR, {1: [-1.0]}))
        assert not step(line_space.point(ZERO_ANCHOR, {1: [0.5]}))

    def test_unknown_profile(self, line_space):
        """Profiles come from a fixed table."""
        with pytest.raises(ValueError):
            coordinate_function(line_space, "wiggle")
        with pytest.raises(PreconditionError):
            coordinate_function(line_space, "norm", [0])

    def test_describe(self, unit_f):
        """describe() reports the construction metadata."""
        info = unit_f.describe()
        assert info["kind"] == "THM52"
        assert info["ball_product"]["radii"] == {"prefix": [], "tail": 1.0}
        assert math.isfinite(info["range"][1])
