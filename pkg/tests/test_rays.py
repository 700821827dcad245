import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tcconsensus import (
    BoxRaySpec,
    EquilibriumRaySpec,
    distance_to_box,
    lyapunov_V,
    lyapunov_Y,
    ray_geometry_check,
)
from tcconsensus.errors import DimensionMismatchError


class TestBoxRaySpec:
    def test_rays_pass_through_anchor(self):
        spec = BoxRaySpec(-1.0, 1.0, 0.25, -0.5, -2.0)
        assert spec.l1(0.25) == spec.l2(0.25) == 0.25

    def test_anchor_must_lie_in_box(self):
        with pytest.raises(ValueError):
            BoxRaySpec(-1.0, 1.0, 2.0, -1.0, -1.0)

    def test_unit_product_rule(self):
        assert BoxRaySpec(-1, 1, 0, -0.5, -2.0).check_unit_product()
        assert not BoxRaySpec(-1, 1, 0, -0.5, -1.0).check_unit_product()
        assert not BoxRaySpec(-1, 1, 0, 0.5, 2.0).check_unit_product()

    def test_slope_product(self):
        assert BoxRaySpec(-1, 1, 0, -0.8, -0.8).slope_product == pytest.approx(0.64)


class TestEquilibriumRaySpec:
    def test_valid(self):
        spec = EquilibriumRaySpec(-0.5, -2.0)
        assert spec.k_e1 * spec.k_e2 == pytest.approx(1.0)

    def test_positive_slope_rejected(self):
        with pytest.raises(ValueError):
            EquilibriumRaySpec(0.5, 2.0)

    def test_product_must_be_one(self):
        with pytest.raises(ValueError):
            EquilibriumRaySpec(-0.5, -0.5)


class TestRayGeometry:
    def test_asymmetric_slopes(self):
        report = ray_geometry_check(BoxRaySpec(-1.0, 1.0, 0.0, -0.5, -2.0))
        assert report.diameter == 2.0
        assert report.min_branch == pytest.approx(1.5)
        assert report.max_branch == pytest.approx(3.0)
        assert report.meets_min and not report.meets_max

    def test_degenerate_box(self):
        report = ray_geometry_check(BoxRaySpec(0.0, 0.0, 0.0, -1.0, -1.0))
        assert report.diameter == report.min_branch == report.max_branch == 0.0
        assert report.meets_min and report.meets_max

    def test_symmetric_boundary_equality(self):
        report = ray_geometry_check(BoxRaySpec(-1.0, 1.0, 0.0, -1.0, -1.0))
        assert report.min_branch == report.max_branch == report.diameter == 2.0
        assert report.meets_min and report.meets_max

    @given(
        st.floats(-3, 0),
        st.floats(0, 3),
        st.floats(0.05, 1),
    )
    @settings(max_examples=100, deadline=None)
    def test_unit_product_guarantees_min_branch(self, lo, hi, k_abs):
        anchor = 0.5 * (lo + hi)
        spec = BoxRaySpec(lo, hi, anchor, -k_abs, -1.0 / k_abs)
        assert ray_geometry_check(spec).meets_min


class TestLyapunovY:
    def test_five_term_example(self):
        spec = BoxRaySpec(-1.0, 1.0, 0.0, -0.8, -0.8)
        y, term = lyapunov_Y([3.0, -0.5], spec)
        # independent oracle: evaluate the five terms by hand
        terms = [2.0, 3.0 - (-1.0), 1.0 - (-0.5), 1.8 * 3.0, 1.8 * 0.5]
        assert y == pytest.approx(max(terms)) == pytest.approx(5.4)
        assert term == "right_ray"

    def test_inside_box_is_diameter(self):
        spec = BoxRaySpec(-1.0, 1.0, 0.0, -1.0, -1.0)
        y, term = lyapunov_Y([0.2, -0.3, 0.9], spec)
        assert y == 2.0 and term == "box"

    def test_degenerate_zero(self):
        spec = BoxRaySpec(0.0, 0.0, 0.0, -1.0, -1.0)
        y, term = lyapunov_Y([0.0, 0.0], spec)
        assert y == 0.0 and term == "box"

    def test_tie_prefers_box_term(self):
        # state exactly filling the box: x_M - box_lo ties the diameter
        spec = BoxRaySpec(-1.0, 1.0, 0.0, -0.1, -0.1)
        _, term = lyapunov_Y([-1.0, 1.0], spec)
        assert term == "box"

    @given(
        st.lists(st.floats(-10, 10), min_size=1, max_size=6),
        st.floats(-2, 0),
        st.floats(0, 2),
    )
    @settings(max_examples=150, deadline=None)
    def test_never_below_diameter(self, state, lo, hi):
        spec = BoxRaySpec(lo, hi, 0.5 * (lo + hi), -1.0, -1.0)
        y, _ = lyapunov_Y(state, spec)
        assert y >= hi - lo - 1e-12

    def test_max_of_five_oracle(self):
        rng = np.random.default_rng(7)
        spec = BoxRaySpec(-1.5, 2.0, 0.5, -0.25, -3.0)
        for _ in range(50):
            x = rng.uniform(-8, 8, size=4)
            x_m, x_M = x.min(), x.max()
            oracle = max(
                spec.box_hi - spec.box_lo,
                x_M - spec.box_lo,
                spec.box_hi - x_m,
                (1 - spec.k2) * (x_M - spec.anchor),
                (1 - spec.k1) * (spec.anchor - x_m),
            )
            assert lyapunov_Y(x, spec)[0] == pytest.approx(oracle)


class TestLyapunovV:
    def test_two_coordinate_example(self):
        spec = EquilibriumRaySpec(-0.5, -2.0)
        v = lyapunov_V([1.0, -2.0], [0.0, 0.0], spec)
        # per-coordinate oracle: max{3*1, 1.5*2} = 3
        assert v == pytest.approx(3.0)

    def test_zero_at_equilibrium(self):
        spec = EquilibriumRaySpec(-1.0, -1.0)
        assert lyapunov_V([0.3, -0.7], [0.3, -0.7], spec) == 0.0

    def test_symmetric_example(self):
        spec = EquilibriumRaySpec(-1.0, -1.0)
        assert lyapunov_V([0.5, -0.5], [0.0, 0.0], spec) == pytest.approx(1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            lyapunov_V([1.0, 2.0], [0.0], EquilibriumRaySpec(-1.0, -1.0))

    @given(
        st.lists(st.floats(-5, 5), min_size=2, max_size=5),
        st.floats(0.1, 10),
    )
    @settings(max_examples=100, deadline=None)
    def test_positively_homogeneous_in_error(self, eps, c):
        spec = EquilibriumRaySpec(-0.5, -2.0)
        e = np.linspace(-1, 1, len(eps))
        eps = np.asarray(eps)
        v1 = lyapunov_V(e + eps, e, spec)
        vc = lyapunov_V(e + c * eps, e, spec)
        assert vc == pytest.approx(c * v1, rel=1e-9, abs=1e-9)

    def test_zero_only_at_equilibrium(self):
        spec = EquilibriumRaySpec(-0.5, -2.0)
        assert lyapunov_V([1e-9, 0.0], [0.0, 0.0], spec) > 0


class TestDistanceToBox:
    def test_single_excess(self):
        assert distance_to_box([2.0, 0.5], -1.0, 1.0) == pytest.approx(1.0)

    def test_inside(self):
        assert distance_to_box([0.0, -1.0, 1.0], -1.0, 1.0) == 0.0

    def test_two_sided_excess(self):
        assert distance_to_box([2.0, -2.0], -1.0, 1.0) == pytest.approx(math.sqrt(2))

    def test_invalid_box(self):
        with pytest.raises(ValueError):
            distance_to_box([0.0], 1.0, -1.0)

    @given(st.lists(st.floats(-20, 20), min_size=1, max_size=6))
    @settings(max_examples=100, deadline=None)
    def test_matches_projection_oracle(self, state):
        x = np.asarray(state)
        proj = np.clip(x, -1.0, 1.0)
        assert distance_to_box(x, -1.0, 1.0) == pytest.approx(
            float(np.linalg.norm(x - proj))
        )
