import numpy as np
import pytest

from tcconsensus import (
    Affine,
    Identity,
    IntegrationSpec,
    PiecewiseLinear,
    Saturation,
    System,
    build_digraph,
    integrate_batch,
    invariant_box,
    residual,
    scenario_by_name,
    seed_stream,
    solve_equilibrium,
    theta_hull,
    uniqueness_probe,
)
from tcconsensus.errors import (
    EmptyFixedPointSetError,
    NoInEdgeAgentError,
    UnconvergedError,
)


def two_agent(f_01, f_10):
    g = build_digraph([[0.0, 1.0], [1.0, 0.0]])
    return System(g, {(1, 0): f_10, (0, 1): f_01})


def complete_identity(n):
    g = build_digraph(np.ones((n, n)) - np.eye(n))
    return System(g, {e: Identity() for e in g.edges()})


AFFINE_PAIR = two_agent(Affine(-0.5, 1.0), Affine(-0.5, -1.0))


class TestResidual:
    def test_affine_pair_at_solution(self):
        # linear-system oracle: e0 = -0.5*e1 - 1, e1 = -0.5*e0 + 1 -> (-2, 2)
        assert residual(AFFINE_PAIR, [-2.0, 2.0]) == pytest.approx(0.0, abs=1e-12)

    def test_identity_consensus_vector(self):
        sys_ = complete_identity(4)
        assert residual(sys_, np.full(4, 3.7)) == 0.0

    def test_consensus_zone_point(self):
        sys_ = scenario_by_name("ex1").system
        assert residual(sys_, np.zeros(sys_.n)) < 1e-12

    def test_positive_away_from_equilibrium(self):
        assert residual(AFFINE_PAIR, [0.0, 0.0]) > 0.5


class TestSolveEquilibrium:
    def test_contraction_to_origin(self):
        sys_ = two_agent(Affine(-0.5, 0.0), Affine(-0.5, 0.0))
        eq = solve_equilibrium(sys_, [5.0, -3.0])
        assert eq.point == pytest.approx([0.0, 0.0], abs=1e-9)
        assert eq.residual < 1e-10
        assert eq.method == "picard"

    def test_affine_pair_matches_linear_oracle(self):
        eq = solve_equilibrium(AFFINE_PAIR, [7.0, 7.0])
        assert eq.point == pytest.approx([-2.0, 2.0], abs=1e-9)

    def test_residual_recomputes(self):
        eq = solve_equilibrium(AFFINE_PAIR, [0.3, -0.4], tol=1e-10)
        assert residual(AFFINE_PAIR, eq.point) <= 1e-10

    def test_all_affine_matches_assembled_linear_system(self):
        rng = np.random.default_rng(11)
        n = 5
        w = np.ones((n, n)) - np.eye(n)
        g = build_digraph(w)
        slopes = rng.uniform(-0.8, 0.8, size=(n, n))
        offsets = rng.uniform(-1, 1, size=(n, n))
        constraints = {
            (j, i): Affine(float(slopes[i, j]), float(offsets[i, j]))
            for (j, i) in g.edges()
        }
        sys_ = System(g, constraints)
        # oracle: e_i = (1/alpha_i) sum_j a_ij (k_ij e_j + m_ij)
        A_f = w * slopes
        b = (w * offsets).sum(axis=1)
        D = np.diag(w.sum(axis=1))
        oracle = np.linalg.solve(np.eye(n) - np.linalg.inv(D) @ A_f,
                                 np.linalg.inv(D) @ b)
        eq = solve_equilibrium(sys_, np.zeros(n), tol=1e-12)
        assert eq.point == pytest.approx(oracle, abs=1e-9)

    def test_no_in_edge_agent(self):
        g = build_digraph([[0.0, 1.0], [0.0, 0.0]])
        sys_ = System(g, {(1, 0): Identity()})
        with pytest.raises(NoInEdgeAgentError):
            solve_equilibrium(sys_, [0.0, 0.0])

    def test_unconverged_reports_best_point(self):
        # both edges shift by +1: the mean drifts and no equilibrium exists
        sys_ = two_agent(Affine(1.0, 1.0), Affine(1.0, 1.0))
        with pytest.raises(UnconvergedError) as exc:
            solve_equilibrium(sys_, [0.0, 0.0], budget=50)
        assert np.all(np.isfinite(exc.value.best))
        assert exc.value.residual > 0


class TestSeedStream:
    def test_deterministic(self):
        a = seed_stream(42, 5, 3, -1.0, 1.0)
        b = seed_stream(42, 5, 3, -1.0, 1.0)
        assert a.tobytes() == b.tobytes()

    def test_seed_sensitivity(self):
        a = seed_stream(42, 5, 3, -1.0, 1.0)
        b = seed_stream(43, 5, 3, -1.0, 1.0)
        assert not np.allclose(a, b)

    def test_shape_and_bounds(self):
        pts = seed_stream(0, 20, 4, 2.0, 5.0)
        assert pts.shape == (20, 4)
        assert pts.min() >= 2.0 and pts.max() <= 5.0

    def test_spread_over_box(self):
        pts = seed_stream(7, 200, 1, 0.0, 1.0)
        assert pts.std() > 0.2


class TestUniquenessProbe:
    def test_needs_two_starts(self):
        with pytest.raises(ValueError):
            uniqueness_probe(AFFINE_PAIR, (-5, 5), 1)

    def test_unique_equilibrium_single_cluster(self):
        sys_ = scenario_by_name("ex3").system
        report = uniqueness_probe(sys_, (-5.0, 5.0), 10, tol=1e-8)
        assert report.cluster_count == 1
        rep, members = report.clusters[0]
        assert members == 10
        assert residual(sys_, rep) <= 1e-8

    def test_identity_continuum_many_clusters(self):
        report = uniqueness_probe(complete_identity(3), (-5.0, 5.0), 6)
        assert report.cluster_count >= 2
        # every solution is a consensus point
        for rep, _ in report.clusters:
            assert np.ptp(rep) < 1e-6

    def test_note_disclaims_proof(self):
        report = uniqueness_probe(AFFINE_PAIR, (-5, 5), 2)
        assert "not a proof" in report.note

    def test_deterministic(self):
        a = uniqueness_probe(AFFINE_PAIR, (-5, 5), 4, seed=3)
        b = uniqueness_probe(AFFINE_PAIR, (-5, 5), 4, seed=3)
        assert a.cluster_count == b.cluster_count
        assert a.clusters[0][0] == pytest.approx(b.clusters[0][0])


class TestThetaHull:
    def test_ex2_hull(self):
        assert theta_hull(scenario_by_name("ex2").system) == pytest.approx((-1.0, 1.0))

    def test_point_hull(self):
        sys_ = two_agent(Affine(-0.5, 0.0), Affine(-0.5, 0.0))
        assert theta_hull(sys_) == pytest.approx((0.0, 0.0))

    def test_empty_edge_set_raises(self):
        sys_ = two_agent(Affine(1.0, 0.5), Identity())
        with pytest.raises(EmptyFixedPointSetError):
            theta_hull(sys_)


class TestInvariantBox:
    def test_hull_pm1_slope_floor_half(self):
        # oracle: hull [-1, 1], uniform floor k* = -0.5 -> solve
        # -0.5x + 1.5 = -x giving x = -3, so the box is (-3, 3)
        f = PiecewiseLinear(((-1.0, -1.0), (1.0, 1.0)), -0.5, -0.5)
        box = invariant_box(two_agent(f, f))
        assert box == pytest.approx((-3.0, 3.0))

    def test_degenerate_point_hull(self):
        sys_ = two_agent(Affine(-0.5, 0.0), Affine(-0.5, 0.0))
        assert invariant_box(sys_) == pytest.approx((0.0, 0.0))

    def test_translated_degenerate_hull(self):
        sys_ = two_agent(Affine(-0.5, 1.5), Affine(-0.5, 1.5))
        assert invariant_box(sys_) == pytest.approx((1.0, 1.0))

    def test_ex4_box(self):
        assert invariant_box(scenario_by_name("ex4").system) == pytest.approx(
            (-3.4, 3.4)
        )

    def test_uncertified_floor_returns_none(self):
        sys_ = two_agent(Affine(-2.0, 0.0), Affine(-2.0, 0.0))
        assert invariant_box(sys_) is None

    def test_excess_ceiling_returns_none(self):
        f = PiecewiseLinear(((-1.0, -2.0), (1.0, 2.0)), 0.0, 0.0)
        assert invariant_box(two_agent(f, f)) is None

    def test_nonnegative_floor_falls_back_to_hull(self):
        sat = Saturation(-1.0, 1.0)
        assert invariant_box(two_agent(sat, sat)) == pytest.approx((-1.0, 1.0))

    def test_unbounded_hull_returns_none(self):
        assert invariant_box(complete_identity(3)) is None

    def test_box_is_invariant_under_dynamics(self):
        sys_ = scenario_by_name("ex4").system
        lo, hi = invariant_box(sys_)
        starts = seed_stream(5, 20, sys_.n, lo, hi)
        # pin some coordinates to the boundary
        starts[::2, 0] = hi
        starts[1::2, -1] = lo
        batch = integrate_batch(sys_, starts, IntegrationSpec(1e-3, 2.0))
        slack = 10.0 * 1e-3 * 4.0
        assert batch.states.min() >= lo - slack
        assert batch.states.max() <= hi + slack

    def test_equilibria_lie_inside_box(self):
        sys_ = scenario_by_name("ex4").system
        lo, hi = invariant_box(sys_)
        report = uniqueness_probe(sys_, (lo, hi), 10, tol=1e-8, seed=2)
        for rep, _ in report.clusters:
            assert rep.min() >= lo - 1e-6 and rep.max() <= hi + 1e-6
