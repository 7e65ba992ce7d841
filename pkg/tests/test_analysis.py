import numpy as np
import pytest

from analysis.certification import (
    BoundarySampler, FixedSampler, Verdict, forward_lipschitz_profile, tangent_nonempty_check,
)
from analysis.lemmas import ProbeError, lemma1_probe, lemma2_probe
from domain.errors import InfeasiblePointError
from domain.models import PiecewiseDomain
from geometry.cones import temporal_tangent_union
from geometry.projection import project_union
from scenarios.catalog import get_scenario
from scenarios.two_bus import two_bus_domain

BOX = ((-2.0, -0.5), (2.0, 2.0))


def _sampler(n_samples=30, seed=0):
    return BoundarySampler(lower=BOX[0], upper=BOX[1], n_samples=n_samples, seed=seed, anchors=((0.0, 0.0),))


class TestSamplers:
    def test_boundary_sampler_returns_feasible_points(self, wedge):
        points = _sampler().sample(wedge, 0.0)
        assert points.shape == (31, 2)
        np.testing.assert_array_equal(points[0], [0.0, 0.0])
        assert all(wedge.contains(p, 0.0) for p in points)

    def test_boundary_sampler_is_seeded(self, wedge):
        np.testing.assert_array_equal(_sampler(seed=4).sample(wedge, 0.0), _sampler(seed=4).sample(wedge, 0.0))

    def test_infeasible_anchor_is_dropped(self, disk):
        sampler = BoundarySampler(lower=(-1.0, -1.0), upper=(1.0, 1.0), n_samples=5, anchors=((3.0, 0.0),))
        points = sampler.sample(disk, 0.0)
        assert not any(np.array_equal(p, [3.0, 0.0]) for p in points)


class TestForwardLipschitz:
    def test_wedge_is_forward_lipschitz(self, wedge):
        profile = forward_lipschitz_profile(wedge, 0.0, _sampler())
        assert profile.verdict is Verdict.FORWARD_LIPSCHITZ
        assert 0.8 <= profile.L_hat <= 1.3
        # a ponta da cunha anda exatamente δ
        np.testing.assert_allclose(profile.ratios[0], 1.0, atol=1e-7)
        assert profile.horizon == pytest.approx(0.1)
        assert profile.oracle_checks
        assert all(check['agrees'] for check in profile.oracle_checks)

    def test_parabola_diverges_at_the_tip(self, parabola):
        profile = forward_lipschitz_profile(parabola, 0.0, _sampler())
        assert profile.verdict is Verdict.DIVERGENT
        assert 8.0 <= profile.ratios[0, 1] <= 12.0
        assert 80.0 <= profile.ratios[0, 3] <= 120.0
        assert profile.slope < -0.1

    def test_static_domain_has_zero_ratios(self, half_plane):
        sampler = FixedSampler(points=((0.0, 0.0), (1.0, -0.5), (-2.0, -3.0)))
        profile = forward_lipschitz_profile(half_plane, 0.0, sampler)
        np.testing.assert_array_equal(profile.ratios, 0.0)
        assert profile.verdict is Verdict.FORWARD_LIPSCHITZ
        assert profile.L_hat == 0.0
        assert profile.slope == 0.0

    def test_thread_count_does_not_change_ratios(self, wedge):
        single = forward_lipschitz_profile(wedge, 0.0, _sampler(n_samples=12), threads=1)
        many = forward_lipschitz_profile(wedge, 0.0, _sampler(n_samples=12), threads=3)
        np.testing.assert_array_equal(single.ratios, many.ratios)
        assert single.verdict is many.verdict

    def test_delta_grid_must_decrease(self, wedge):
        with pytest.raises(ValueError):
            forward_lipschitz_profile(wedge, 0.0, _sampler(), delta_grid=(1e-3, 1e-2))
        with pytest.raises(ValueError):
            forward_lipschitz_profile(wedge, 0.0, _sampler(), delta_grid=(1e-1, 0.0))

    def test_infeasible_samples_are_rejected(self, wedge):
        with pytest.raises(InfeasiblePointError):
            forward_lipschitz_profile(wedge, 0.0, FixedSampler(points=((0.0, 1.0),)))

    def test_export_rows_and_dict(self, wedge):
        profile = forward_lipschitz_profile(wedge, 0.0, FixedSampler(points=((0.0, 0.0),)),
                                            delta_grid=(1e-1, 1e-2))
        rows = profile.ratio_rows()
        assert [(r['point_id'], r['delta']) for r in rows] == [(0, 1e-1), (0, 1e-2)]
        data = profile.to_dict()
        assert data['verdict'] == 'FORWARD_LIPSCHITZ'
        assert data['projection_failures'] == 0

    def test_union_constant_is_bounded_by_its_pieces(self, wedge):
        piece_profiles = [forward_lipschitz_profile(PiecewiseDomain((piece,)), 0.0, _sampler()) for piece in wedge]
        assert all(p.verdict is Verdict.FORWARD_LIPSCHITZ for p in piece_profiles)
        union = forward_lipschitz_profile(wedge, 0.0, _sampler())
        assert union.verdict is Verdict.FORWARD_LIPSCHITZ
        assert union.L_hat <= 1.2 * max(p.L_hat for p in piece_profiles)

    @pytest.mark.slow
    @pytest.mark.parametrize('t', [0.0, 0.5])
    def test_two_bus_is_forward_lipschitz(self, t):
        scenario = get_scenario('two-bus')
        sampler = BoundarySampler(lower=scenario.box[0], upper=scenario.box[1], anchors=scenario.anchors)
        profile = forward_lipschitz_profile(scenario.domain, t, sampler)
        assert profile.verdict is Verdict.FORWARD_LIPSCHITZ
        assert 0.1 <= profile.L_hat <= 1.5


class TestTangentCheck:
    def test_wedge_tip_witness(self, wedge):
        report = tangent_nonempty_check(wedge, [0.0, 0.0], 0.0, L_hat=1.0)
        assert report.nonempty
        np.testing.assert_allclose(report.witness, [1.0, 0.0], atol=1e-9)
        assert report.within_bound
        assert not tangent_nonempty_check(wedge, [0.0, 0.0], 0.0, L_hat=0.5).within_bound

    def test_parabola_tip_is_empty(self, parabola):
        report = tangent_nonempty_check(parabola, [0.0, 0.0], 0.0, L_hat=1.0)
        assert not report.nonempty
        assert report.witness is None
        assert report.statuses == ('EMPTY',)
        assert report.to_dict()['witness_norm'] is None

    def test_interior_witness_is_zero(self, disk):
        report = tangent_nonempty_check(disk, [0.1, 0.1], 0.0, L_hat=0.0)
        np.testing.assert_array_equal(report.witness, [0.0, 0.0])
        assert report.within_bound

    def test_sampled_points_respect_the_certified_constant(self, wedge, rng):
        profile = forward_lipschitz_profile(wedge, 0.0, _sampler())
        for x in profile.sample_points:
            report = tangent_nonempty_check(wedge, x, 0.0, profile.L_hat)
            assert report.nonempty
            assert report.witness_norm <= 1.2 * profile.L_hat
            union = temporal_tangent_union(wedge, x, 0.0)
            for _ in range(5):
                f = 3.0 * rng.standard_normal(2)
                velocity = project_union(f, union).vector
                assert np.linalg.norm(velocity) <= profile.L_hat + np.linalg.norm(f) + 1e-6


class TestDistanceBounds:
    def test_disk_violation_ratio(self, disk):
        sampler = FixedSampler(points=((1.5, 0.0), (0.0, 1.2), (0.2, 0.0)))
        report = lemma2_probe(disk[0], 0.0, sampler, radius=1.0)
        assert report.skipped == 1
        np.testing.assert_allclose(sorted(report.ratios), [2.2, 2.5], atol=1e-6)
        assert report.fitted_L == pytest.approx(2.2, abs=1e-6)
        assert not report.violated
        for (y, x), ratio in zip(report.pairs, report.ratios):
            assert np.linalg.norm(x) == pytest.approx(1.0, abs=1e-8)
            assert ratio == pytest.approx((y @ y - 1.0) / np.linalg.norm(y - x), rel=1e-6)

    def test_half_plane_ratio_is_one(self, half_plane):
        sampler = FixedSampler(points=((0.3, 0.5), (-1.0, 2.0)))
        report = lemma2_probe(half_plane[0], 0.0, sampler, radius=5.0)
        np.testing.assert_allclose(report.ratios, [1.0, 1.0], atol=1e-9)

    def test_points_beyond_radius_are_skipped(self, half_plane):
        sampler = FixedSampler(points=((0.0, 0.5), (0.0, 3.0)))
        report = lemma2_probe(half_plane[0], 0.0, sampler, radius=1.0)
        assert report.skipped == 1
        assert len(report.ratios) == 1

    def test_only_feasible_samples(self, disk):
        with pytest.raises(ProbeError):
            lemma2_probe(disk[0], 0.0, FixedSampler(points=((0.0, 0.0), (0.5, 0.5))), radius=1.0)

    def test_two_bus_pv_regime(self):
        theta = -0.1
        feasible = np.array([0.3 + np.sin(theta), 1.0 - np.cos(theta), 1.0, theta])
        sampler = FixedSampler(points=(
            tuple(feasible + [0.01, 0.005, 0.01, 0.01]),
            tuple(feasible + [-0.02, 0.0, -0.01, 0.0]),
        ))
        report = lemma2_probe(two_bus_domain()[0], 0.5, sampler, radius=1.0)
        assert report.fitted_L > 0.0
        assert not report.violated

    def test_directional_bound_on_disk(self, disk):
        report = lemma1_probe(disk[0], [1.0, 0.0], 0.0, directions=([1.0, 0.0], [1.0, 1.0]))
        assert report.fitted_L == pytest.approx(np.sqrt(2.0), abs=1e-2)
        radial = lemma1_probe(disk[0], [1.0, 0.0], 0.0, directions=([1.0, 0.0],))
        assert radial.fitted_L == pytest.approx(2.001)

    def test_directional_bound_rejects_bad_directions(self, disk):
        with pytest.raises(ValueError):
            lemma1_probe(disk[0], [1.0, 0.0], 0.0, directions=([0.0, 0.0],))
        with pytest.raises(ValueError):
            lemma1_probe(disk[0], [1.0, 0.0], 0.0, directions=([0.0, 1.0],))
