import numpy as np
import pytest

from cmapsmith import reward as rw
from cmapsmith.environment import Trajectory


def make_traj(interior, tid="t"):
    labs = np.vstack([[100.0, 0, 0], np.asarray(interior, float), [0.0, 0, 0]])
    return Trajectory(labs=labs, id=tid, provenance="corpus")


class TestPerimeterDistances:
    def test_anchor_on_trajectory_gives_zero(self):
        anchors, norm = rw.perimeter_anchors()
        t = make_traj([anchors[2], [20.0, 1, 1]])
        k = rw.perimeter_distances(t)
        assert k[2] == pytest.approx(0.0, abs=1e-12)

    def test_neutral_axis_symmetry(self):
        t = make_traj([[80.0, 0, 0], [60.0, 0, 0], [40.0, 0, 0], [20.0, 0, 0]])
        k = rw.perimeter_distances(t)
        assert np.ptp(k) < 1e-6

    def test_matches_brute_force(self):
        rng = np.random.default_rng(9)
        anchors, norm = rw.perimeter_anchors()
        for _ in range(20):
            interior = rng.uniform([5, -60, -60], [95, 60, 60], (7, 3))
            interior = interior[np.argsort(-interior[:, 0])]
            t = make_traj(interior)
            k = rw.perimeter_distances(t)
            brute = np.array(
                [min(np.linalg.norm(p - a) for p in interior) for a in anchors]
            )
            assert np.allclose(k, np.clip(brute / norm, 0, 1), atol=1e-12)

    def test_values_in_unit_interval(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            interior = rng.uniform([5, -100, -100], [95, 100, 100], (5, 3))
            interior = interior[np.argsort(-interior[:, 0])]
            k = rw.perimeter_distances(make_traj(interior))
            assert np.all(k >= 0) and np.all(k <= 1)

    def test_no_interior_states_errors(self):
        t = Trajectory(labs=np.array([[100.0, 0, 0], [0.0, 0, 0]]), id="empty")
        with pytest.raises(ValueError, match="interior"):
            rw.perimeter_distances(t)


class TestChromaSlope:
    def test_constant_chroma_flat(self):
        t = make_traj([[80.0, 10, 0], [60.0, 0, 10], [40.0, -10, 0], [20.0, 0, -10]])
        assert rw.chroma_slope(t) == pytest.approx(0.0, abs=1e-12)

    def test_two_point_secant(self):
        t = make_traj([[80.0, 10, 0], [20.0, 70, 0]])
        assert rw.chroma_slope(t) == pytest.approx(-1.0, abs=1e-12)

    def test_invariant_under_hue_rotation(self):
        rng = np.random.default_rng(17)
        interior = rng.uniform([10, -40, -40], [90, 40, 40], (6, 3))
        interior = interior[np.argsort(-interior[:, 0])]
        t = make_traj(interior)
        ang = 1.1
        rot = interior.copy()
        rot[:, 1] = np.cos(ang) * interior[:, 1] - np.sin(ang) * interior[:, 2]
        rot[:, 2] = np.sin(ang) * interior[:, 1] + np.cos(ang) * interior[:, 2]
        assert rw.chroma_slope(make_traj(rot)) == pytest.approx(rw.chroma_slope(t), abs=1e-9)

    def test_constant_lightness_errors(self):
        t = make_traj([[50.0, 10, 0], [50.0, 20, 0]])
        with pytest.raises(ValueError, match="constant"):
            rw.chroma_slope(t)


class TestFeaturize:
    def _candidates(self):
        rng = np.random.default_rng(23)
        out = []
        for i in range(12):
            interior = rng.uniform([10, -50, -50], [90, 50, 50], (6, 3))
            interior = interior[np.argsort(-interior[:, 0])]
            out.append(make_traj(interior, tid=f"c{i}"))
        return out

    def test_max_slope_candidate_has_unit_m(self):
        cands = self._candidates()
        config = rw.RewardConfig()
        slopes = [abs(rw.chroma_slope(t)) for t in cands]
        norm = max(slopes)
        winner = cands[int(np.argmax(slopes))]
        fv = rw.featurize(winner, config, norm)
        assert abs(fv.m) == pytest.approx(1.0, abs=1e-12)

    def test_all_candidates_bounded(self):
        cands = self._candidates()
        ctx = rw.RewardContext.for_candidates(cands)
        for t in cands:
            phi = ctx.features(t)
            assert phi.shape == (9,)
            assert np.all(np.isfinite(phi))
            assert np.all(phi[:8] >= 0) and np.all(phi[:8] <= 1)
            assert -1 <= phi[8] <= 1

    def test_deterministic(self):
        t = self._candidates()[0]
        config = rw.RewardConfig()
        a = rw.featurize(t, config, 2.0).to_array()
        b = rw.featurize(t, config, 2.0).to_array()
        assert np.array_equal(a, b)

    def test_slope_clamped_beyond_corpus_max(self):
        steep = make_traj([[80.0, 5, 0], [20.0, 90, 0]])
        fv = rw.featurize(steep, rw.RewardConfig(), slope_norm=0.5)
        assert fv.m == -1.0


class TestTrajectoryReward:
    def test_zero_theta_zero_reward(self):
        t = make_traj([[80.0, 10, 5], [30.0, 20, -5]])
        assert rw.trajectory_reward(t, np.zeros(9), rw.RewardConfig(), 1.0) == 0.0

    def test_basis_projection(self):
        t = make_traj([[80.0, 10, 5], [30.0, 20, -5]])
        config = rw.RewardConfig()
        phi = rw.featurize(t, config, 1.0).to_array()
        theta = np.zeros(9)
        theta[1] = 1.0
        assert rw.trajectory_reward(t, theta, config, 1.0) == pytest.approx(phi[1])

    def test_linearity_in_theta(self):
        rng = np.random.default_rng(31)
        t = make_traj([[80.0, 10, 5], [30.0, 20, -5]])
        config = rw.RewardConfig()
        t1, t2 = rng.normal(0, 1, 9), rng.normal(0, 1, 9)
        a, b = 1.7, -0.4
        lhs = rw.trajectory_reward(t, a * t1 + b * t2, config, 1.0)
        rhs = a * rw.trajectory_reward(t, t1, config, 1.0) + b * rw.trajectory_reward(
            t, t2, config, 1.0
        )
        assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_wrong_dimension_rejected(self):
        t = make_traj([[80.0, 10, 5], [30.0, 20, -5]])
        with pytest.raises(ValueError, match="9"):
            rw.trajectory_reward(t, np.zeros(8), rw.RewardConfig(), 1.0)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            rw.RewardConfig(landing_reward=-1.0)
        with pytest.raises(ValueError):
            rw.RewardConfig(step_penalty=0.5)
