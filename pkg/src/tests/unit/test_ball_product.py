"""
Unit tests for ball products, unions and radius extension.
"""
import pytest

from src.constructions.ball_product import BallProduct, NearlyOpenUnion, Radii, ball_product_from_radii
from src.constructions.radii import radii_extension
from src.sigma.errors import AnchorMismatchError, EmptyUnionError, NotNearlyOpenError, PreconditionError
from src.sigma.space import ZERO_ANCHOR, Anchor
from src.sigma.topology import PredicateTag
from src.sigma.traces import trace_of_ball_product, trace_of_point, trace_of_predicate


@pytest.mark.unit
class TestRadii:
    """Eventually constant radius sequences."""

    def test_prefix_then_tail(self):
        """r_n reads the prefix, then repeats the tail."""
        radii = Radii((0.5, 0.25), 2.0)
        assert [radii(n) for n in (1, 2, 3, 10)] == [0.5, 0.25, 2.0, 2.0]
        assert radii.to_dict() == {"prefix": [0.5, 0.25], "tail": 2.0}

    @pytest.mark.parametrize("prefix,tail", [((0.0,), 1.0), ((), -1.0), ((1.0,), float("inf"))])
    def test_invalid(self, prefix, tail):
        """Radii are positive and finite."""
        with pytest.raises(ValueError):
            Radii(prefix, tail)


@pytest.mark.unit
class TestBallProduct:
    """Membership in W and its closure."""

    def test_membership(self, line_space):
        """Every coordinate must sit strictly inside its ball."""
        bp = BallProduct(line_space.point(ZERO_ANCHOR, {2: [1.0]}), Radii((1.0, 0.5), 0.1))
        assert bp.contains(line_space, line_space.point(ZERO_ANCHOR, {1: [0.9], 2: [1.4]}))
        assert not bp.contains(line_space, line_space.point(ZERO_ANCHOR, {2: [1.5]}))
        assert not bp.contains(line_space, line_space.point(ZERO_ANCHOR, {2: [1.0], 7: [0.1]}))
        assert bp.closure_contains(line_space, line_space.point(ZERO_ANCHOR, {2: [1.5], 7: [0.1]}))

    def test_other_component_excluded(self, line_space):
        """W lives inside its anchor's component."""
        line_space.register_anchor(Anchor("b", {1: [0.1]}))
        bp = BallProduct(line_space.base_point(ZERO_ANCHOR), Radii.constant(1.0))
        assert not bp.contains(line_space, line_space.base_point("b"))

    def test_predicate_carries_traces(self, line_space):
        """The predicate of W is tagged and analytic."""
        bp = BallProduct(line_space.base_point(ZERO_ANCHOR), Radii.constant(1.0))
        predicate = bp.predicate(line_space)
        assert predicate.tag == PredicateTag.BALL_PRODUCT_UNION
        assert predicate.traces.analytic
        assert predicate(line_space.point(ZERO_ANCHOR, {4: [0.5]}))

    def test_union(self, line_space):
        """A union contains the points of any member."""
        first = BallProduct(line_space.base_point(ZERO_ANCHOR), Radii.constant(1.0))
        second = BallProduct(line_space.point(ZERO_ANCHOR, {1: [3.0]}), Radii.constant(1.0))
        union = NearlyOpenUnion((first, second))
        assert len(union) == 2
        assert union.contains(line_space, line_space.point(ZERO_ANCHOR, {1: [3.5]}))
        assert not union.contains(line_space, line_space.point(ZERO_ANCHOR, {1: [2.0]}))
        assert union.closure_contains(line_space, line_space.point(ZERO_ANCHOR, {1: [2.0]}))
        assert len(union.traces(line_space).cells(1)) == 2

    def test_union_needs_members_on_one_anchor(self, line_space):
        """Empty unions and mixed anchors are rejected."""
        line_space.register_anchor(Anchor("b", {1: [0.1]}))
        with pytest.raises(EmptyUnionError):
            NearlyOpenUnion(())
        with pytest.raises(AnchorMismatchError):
            NearlyOpenUnion((BallProduct(line_space.base_point(ZERO_ANCHOR), Radii()),
                             BallProduct(line_space.base_point("b"), Radii())))


@pytest.mark.unit
class TestRadiiExtension:
    """Half-margin radii inside nearly open sets."""

    def test_unit_cube_halves(self, line_space):
        """Around the origin of the unit cube the radii halve at every stage."""
        cube = trace_of_ball_product(line_space, line_space.base_point(ZERO_ANCHOR), lambda n: 1.0)
        radii = radii_extension(cube, line_space.base_point(ZERO_ANCHOR), 4)
        assert radii == [0.5, 0.25, 0.125, 0.0625]

    def test_radii_stay_inside(self, line_space):
        """The closed products built from the radii fit the traces."""
        W = BallProduct(line_space.point(ZERO_ANCHOR, {1: [0.2]}), Radii((1.0, 0.3), 0.6))
        x = line_space.point(ZERO_ANCHOR, {1: [0.5], 2: [0.1]})
        traces = W.traces(line_space)
        radii = radii_extension(traces, x, 5)
        assert len(radii) == 5
        assert all(r > 0 for r in radii)
        assert all(later <= earlier for earlier, later in zip(radii, radii[1:]))
        centers = [line_space.coordinate(x, k) for k in range(1, 6)]
        for n in range(2, 6):
            cell = traces.cells(n)[0]
            assert cell.margin(line_space.family, centers[:n], radii[:n - 1] + [0.0]) > 0

    def test_extension_builds_ball_product(self, line_space):
        """W(x) from the radii is a ball product around x inside W."""
        W = BallProduct(line_space.base_point(ZERO_ANCHOR), Radii.constant(1.0))
        x = line_space.point(ZERO_ANCHOR, {1: [0.5]})
        radii = radii_extension(W.traces(line_space), x, 3)
        inner = ball_product_from_radii(line_space, x, radii)
        assert inner.radii(10) == radii[-1]
        probe = line_space.point(ZERO_ANCHOR, {1: [0.5 + 0.9 * radii[0]], 2: [0.9 * radii[1]]})
        assert inner.contains(line_space, probe)
        assert W.contains(line_space, probe)

    def test_point_outside_fails(self, line_space):
        """A point on the boundary has no room."""
        cube = trace_of_ball_product(line_space, line_space.base_point(ZERO_ANCHOR), lambda n: 1.0)
        with pytest.raises(NotNearlyOpenError) as info:
            radii_extension(cube, line_space.point(ZERO_ANCHOR, {1: [1.0]}), 2)
        assert info.value.stage == 0

    def test_singleton_not_nearly_open(self, line_space):
        """Singletons have no positive margin."""
        x = line_space.point(ZERO_ANCHOR, {1: [0.5]})
        with pytest.raises(NotNearlyOpenError):
            radii_extension(trace_of_point(line_space, x), x, 2)

    def test_preconditions(self, line_space):
        """Black-box traces, short horizons and foreign anchors are rejected."""
        x = line_space.point(ZERO_ANCHOR, {3: [0.1]})
        cube = trace_of_ball_product(line_space, line_space.base_point(ZERO_ANCHOR), lambda n: 1.0)
        with pytest.raises(PreconditionError):
            radii_extension(trace_of_predicate(line_space, ZERO_ANCHOR, lambda p: True), x, 4)
        with pytest.raises(PreconditionError):
            radii_extension(cube, x, 2)
        line_space.register_anchor(Anchor("b", {1: [0.1]}))
        with pytest.raises(AnchorMismatchError):
            radii_extension(cube, line_space.base_point("b"), 2)
