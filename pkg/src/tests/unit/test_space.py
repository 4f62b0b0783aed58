"""
Unit tests for sparse points, coordinate spaces and boxes.
"""
import math

import numpy as np
import pytest

from src.sigma.errors import AnchorLookupError, DimensionMismatchError, PreconditionError
from src.sigma.space import (
    INFINITE,
    ZERO_ANCHOR,
    Anchor,
    BoxNeighborhood,
    CoordSpace,
    NormKind,
    SigmaSpace,
    SpaceFamily,
    as_vector,
    dist_to_unit_sphere,
    norm,
    random_unit_vector,
)


@pytest.mark.unit
class TestCoordSpace:
    """Norms and sphere distances on one coordinate space."""

    @pytest.mark.parametrize("kind,expected", [
        (NormKind.L1, 7.0),
        (NormKind.L2, 5.0),
        (NormKind.LINF, 4.0),
    ])
    def test_norms(self, kind, expected):
        """The three supported norms of (3, -4)."""
        assert norm(CoordSpace(2, kind), [3.0, -4.0]) == pytest.approx(expected)

    def test_sphere_distance_examples(self):
        """Distance to the unit sphere is | ||v|| - 1 |."""
        assert dist_to_unit_sphere(CoordSpace(2, NormKind.L2), [3.0, 4.0]) == pytest.approx(4.0)
        assert dist_to_unit_sphere(CoordSpace(1), [0.0]) == 1.0
        assert dist_to_unit_sphere(CoordSpace(2, NormKind.LINF), [0.5, -0.25]) == pytest.approx(0.5)

    def test_dimension_checked(self):
        """Vectors of the wrong length are rejected."""
        with pytest.raises(DimensionMismatchError):
            CoordSpace(2).norm([1.0, 2.0, 3.0])
        with pytest.raises(DimensionMismatchError):
            CoordSpace(3).check([1.0])

    def test_invalid_dimension(self):
        """Coordinate spaces have positive integer dimension."""
        with pytest.raises(ValueError):
            CoordSpace(0)

    def test_non_finite_entries_rejected(self):
        """NaN and infinities never enter a point."""
        with pytest.raises(ValueError):
            as_vector([1.0, math.nan])
        with pytest.raises(ValueError):
            as_vector([math.inf])

    @pytest.mark.parametrize("kind", list(NormKind))
    def test_random_unit_vector(self, kind, rng):
        """Random unit vectors have norm one in the space's own norm."""
        space = CoordSpace(3, kind)
        for _ in range(20):
            assert space.norm(random_unit_vector(space, rng)) == pytest.approx(1.0)


@pytest.mark.unit
class TestSpaceFamily:
    """Prefix and tail lookups."""

    def test_prefix_then_tail(self, mixed_space):
        """Indices past the prefix use the tail space."""
        family = mixed_space.family
        assert family.space(1) == CoordSpace(2, NormKind.L1)
        assert family.space(2) == CoordSpace(3, NormKind.LINF)
        assert family.space(3) == CoordSpace(1, NormKind.L2)
        assert family.space(100) == family.tail

    def test_index_zero_rejected(self):
        """Coordinates are numbered from 1."""
        with pytest.raises(PreconditionError):
            SpaceFamily.uniform().space(0)


@pytest.mark.unit
class TestSparsePoints:
    """Canonical override maps, splices and components."""

    def test_overrides_equal_to_anchor_dropped(self, mixed_space):
        """An override equal to the anchor's value is not stored."""
        x = mixed_space.point("shifted", {1: [1.0, 0.0], 3: [2.0]})
        assert x.support == (3,)
        assert mixed_space.coordinate(x, 1) == (1.0, 0.0)

    def test_anchor_coordinates(self, mixed_space):
        """Off the support a point takes its anchor's coordinates."""
        x = mixed_space.base_point("shifted")
        assert mixed_space.coordinate(x, 1) == (1.0, 0.0)
        assert mixed_space.coordinate(x, 2) == (0.0, 0.0, 0.0)
        assert x.max_index == 0

    def test_points_are_hashable_and_compare_exactly(self, line_space):
        """Points built from equal overrides are equal and hash alike."""
        x = line_space.point(ZERO_ANCHOR, {2: [1.5], 1: [0.5]})
        y = line_space.point(ZERO_ANCHOR, {1: [0.5], 2: [1.5]})
        assert x == y
        assert len({x, y}) == 1

    def test_unknown_anchor(self, line_space):
        """Points over unregistered anchors cannot be built."""
        with pytest.raises(AnchorLookupError):
            line_space.point("missing", {})

    def test_wrong_dimension(self, mixed_space):
        """Overrides must match the coordinate dimension."""
        with pytest.raises(DimensionMismatchError):
            mixed_space.point(ZERO_ANCHOR, {1: [1.0]})

    def test_anchor_zero_values_dropped(self, line_space):
        """Registering an anchor drops its zero coordinates."""
        anchor = line_space.register_anchor(Anchor("a", {1: [0.0], 2: [3.0]}))
        assert anchor.indices == (2,)

    def test_splice(self, line_space):
        """a_S^x takes x on S and a elsewhere."""
        a = line_space.point(ZERO_ANCHOR, {1: [1.0], 3: [3.0]})
        x = line_space.point(ZERO_ANCHOR, {1: [-1.0], 2: [2.0]})
        spliced = line_space.splice(a, [1, 2], x)
        assert spliced.as_dict() == {1: (-1.0,), 2: (2.0,), 3: (3.0,)}
        assert line_space.splice(a, [], x) == a

    def test_splice_across_anchors(self, mixed_space):
        """Splicing keeps the anchor of the base point."""
        a = mixed_space.base_point(ZERO_ANCHOR)
        x = mixed_space.point("shifted", {3: [4.0]})
        spliced = mixed_space.splice(a, [1, 3], x)
        assert spliced.anchor_id == ZERO_ANCHOR
        assert mixed_space.coordinate(spliced, 1) == (1.0, 0.0)
        assert mixed_space.coordinate(spliced, 3) == (4.0,)

    def test_defect_and_components(self, mixed_space):
        """Defect counts differing coordinates; across anchors it is infinite."""
        x = mixed_space.point(ZERO_ANCHOR, {3: [1.0]})
        y = mixed_space.point(ZERO_ANCHOR, {3: [1.0], 4: [2.0], 5: [3.0]})
        z = mixed_space.base_point("shifted")
        assert mixed_space.defect(x, y) == 2
        assert mixed_space.differing_indices(x, y) == [4, 5]
        assert mixed_space.in_sigma_n(x, y, 2)
        assert not mixed_space.in_sigma_n(x, y, 1)
        assert mixed_space.defect(x, z) == INFINITE
        assert not mixed_space.same_component(x, z)
        with pytest.raises(PreconditionError):
            mixed_space.differing_indices(x, z)

    def test_dist_d_n(self, mixed_space):
        """d_n is the max coordinate distance over the first n indices."""
        x = mixed_space.point(ZERO_ANCHOR, {1: [1.0, 1.0], 3: [5.0]})
        y = mixed_space.base_point("shifted")
        # ||(0, 1)||_1 = 1 at index 1, 5 at index 3
        assert mixed_space.dist_d_n(x, y, 1) == pytest.approx(1.0)
        assert mixed_space.dist_d_n(x, y, 2) == pytest.approx(1.0)
        assert mixed_space.dist_d_n(x, y, 3) == pytest.approx(5.0)


@pytest.mark.unit
class TestBoxNeighborhood:
    """Tychonoff boxes."""

    def test_box_membership(self, line_space):
        """Only constrained indices matter, balls are open."""
        u = line_space.base_point(ZERO_ANCHOR)
        box = BoxNeighborhood(u, {1: 0.5, 3: 0.1})
        assert line_space.box_contains(box, line_space.point(ZERO_ANCHOR, {1: [0.4], 2: [100.0]}))
        assert not line_space.box_contains(box, line_space.point(ZERO_ANCHOR, {1: [0.5]}))
        assert not line_space.box_contains(box, line_space.point(ZERO_ANCHOR, {3: [0.2]}))

    def test_boxes_contain_other_components(self, mixed_space):
        """Boxes are not confined to the center's component."""
        box = BoxNeighborhood(mixed_space.base_point(ZERO_ANCHOR), {2: 1.0})
        assert mixed_space.box_contains(box, mixed_space.base_point("shifted"))

    def test_around(self, line_space):
        """around() constrains 1..horizon plus extra indices."""
        u = line_space.base_point(ZERO_ANCHOR)
        box = BoxNeighborhood.around(u, 0.25, 3, extra=(7,))
        assert box.indices == (1, 2, 3, 7)
        assert box.horizon == 7
        assert box.radius(2) == 0.25
        assert box.radius(5) is None
        assert BoxNeighborhood.around(u, np.inf, 3).indices == ()

    def test_nonpositive_radius(self, line_space):
        """Box radii are positive."""
        with pytest.raises(ValueError):
            BoxNeighborhood(line_space.base_point(ZERO_ANCHOR), {1: 0.0})


def _random_point(space, rng, max_index=6):
    """Small integer coordinates so that points often agree at an index."""
    anchor_id = space.anchor_ids[int(rng.integers(0, len(space.anchor_ids)))]
    overrides = {}
    for n in range(1, max_index + 1):
        if rng.uniform() < 0.5:
            overrides[n] = rng.integers(-2, 3, space.family.space(n).dim).astype(float)
    return space.point(anchor_id, overrides)


def _random_indices(rng, max_index=6):
    return {int(i) for i in range(1, max_index + 1) if rng.uniform() < 0.4}


@pytest.mark.unit
class TestSigmaProperties:
    """Algebraic properties of splice, defect, components and d_n on random points."""

    TRIALS = 200

    def test_splice_composes_over_disjoint_sets(self, mixed_space, rng):
        """a_S^x then _S'^x equals a_{S u S'}^x for disjoint S, S'."""
        for _ in range(self.TRIALS):
            a, x = _random_point(mixed_space, rng), _random_point(mixed_space, rng)
            S = _random_indices(rng)
            S_prime = _random_indices(rng) - S
            twice = mixed_space.splice(mixed_space.splice(a, S, x), S_prime, x)
            assert twice == mixed_space.splice(a, S | S_prime, x)

    def test_splice_idempotent(self, mixed_space, rng):
        """Splicing the same coordinates again changes nothing."""
        for _ in range(self.TRIALS):
            a, x = _random_point(mixed_space, rng), _random_point(mixed_space, rng)
            S = _random_indices(rng)
            once = mixed_space.splice(a, S, x)
            assert mixed_space.splice(once, S, x) == once

    def test_d_n_ignores_later_coordinates(self, mixed_space, rng):
        """Changing coordinates beyond n leaves d_n unchanged."""
        for _ in range(self.TRIALS):
            x, y = _random_point(mixed_space, rng), _random_point(mixed_space, rng)
            n = int(rng.integers(1, 6))
            moved = y
            for t in range(n + 1, 8):
                moved = mixed_space.with_coordinate(moved, t, rng.normal(size=mixed_space.family.space(t).dim))
            assert mixed_space.dist_d_n(x, moved, n) == mixed_space.dist_d_n(x, y, n)

    def test_d_n_monotone_in_n(self, mixed_space, rng):
        """d_n(x, y) <= d_{n+1}(x, y)."""
        for _ in range(self.TRIALS):
            x, y = _random_point(mixed_space, rng), _random_point(mixed_space, rng)
            distances = [mixed_space.dist_d_n(x, y, n) for n in range(1, 8)]
            assert distances == sorted(distances)

    def test_defect_symmetric(self, mixed_space, rng):
        """defect(x, y) = defect(y, x), infinite exactly across components."""
        for _ in range(self.TRIALS):
            x, y = _random_point(mixed_space, rng), _random_point(mixed_space, rng)
            assert mixed_space.defect(x, y) == mixed_space.defect(y, x)
            assert (mixed_space.defect(x, y) == INFINITE) == (not mixed_space.same_component(x, y))
            assert mixed_space.defect(x, x) == 0

    def test_same_component_is_an_equivalence(self, mixed_space, rng):
        """Reflexive, symmetric and transitive on random triples."""
        for _ in range(self.TRIALS):
            x, y, z = (_random_point(mixed_space, rng) for _ in range(3))
            assert mixed_space.same_component(x, x)
            assert mixed_space.same_component(x, y) == mixed_space.same_component(y, x)
            if mixed_space.same_component(x, y) and mixed_space.same_component(y, z):
                assert mixed_space.same_component(x, z)
