import numpy as np
import pytest

from ktrack import kalman
from ktrack.errors import DegenerateUpdateError, InvalidParameterError, TransportError
from ktrack.kalman import KalmanParams
from ktrack.predictors import PredictorKind
from ktrack.scheduler import (
    FrameRole,
    Provenance,
    ScheduleConfig,
    evaluate_session,
    ideal_inference_count,
    inference_count,
    plan_schedule,
    run_session,
    run_sweep,
)
from ktrack.synthgen import Dataset, TrajectoryKind, TrajectorySpec, generate
from ktrack.trackers import Measurement, OracleConfig, OracleTracker

WU, KF, IN = FrameRole.WARMUP, FrameRole.KEYFRAME, FrameRole.INTERMEDIATE


def cv_dataset(frames=50, num_points=3, seed=2, speed=1.0, **kw):
    return generate(
        TrajectorySpec(
            kind=TrajectoryKind.CONSTANT_VELOCITY,
            frames=frames,
            num_points=num_points,
            seed=seed,
            speed=speed,
            **kw,
        )
    )


class ScriptedTracker:
    """Serves canned measurements: {frame: {pid: Measurement}}."""

    def __init__(self, script, cost_ms=10.0, fail_at=None):
        self.script = script
        self.name = "scripted"
        self.cost_ms = cost_ms
        self.fail_at = fail_at

    def query(self, frame, point_ids):
        if self.fail_at is not None and frame == self.fail_at:
            raise TransportError("scripted transport failure")
        return [self.script[frame][pid] for pid in point_ids]


class TestPlanSchedule:
    def test_quoted_layout(self):
        roles = plan_schedule(ScheduleConfig(12, 3, 3))
        assert roles == [WU, WU, WU, KF, IN, IN, KF, IN, IN, KF, IN, IN]

    def test_every_frame_queried_when_n_is_one(self):
        roles = plan_schedule(ScheduleConfig(4, 1, 1))
        assert roles == [WU, KF, KF, KF]
        assert IN not in roles

    def test_warmup_covers_whole_sequence(self):
        assert plan_schedule(ScheduleConfig(3, 10, 3)) == [WU, WU, WU]

    def test_zero_warmup_starts_at_keyframe(self):
        roles = plan_schedule(ScheduleConfig(6, 3, 0))
        assert roles == [KF, IN, IN, KF, IN, IN]

    def test_keyframes_anchored_at_absolute_index(self):
        # W=3, N=2: first post-warmup keyframe is 4 (3 is odd), not 3+2.
        roles = plan_schedule(ScheduleConfig(8, 2, 3))
        assert roles == [WU, WU, WU, IN, KF, IN, KF, IN]

    def test_determinism(self):
        cfg = ScheduleConfig(40, 7, 3)
        assert plan_schedule(cfg) == plan_schedule(cfg)

    def test_invalid_configs(self):
        with pytest.raises(InvalidParameterError):
            ScheduleConfig(10, 0, 3)
        with pytest.raises(InvalidParameterError):
            ScheduleConfig(10, 5, 11)
        with pytest.raises(InvalidParameterError):
            ScheduleConfig(0, 1, 0)


class TestInferenceCount:
    def test_with_warmup(self):
        assert inference_count(ScheduleConfig(100, 10, 3)) == 12

    def test_per_frame(self):
        assert inference_count(ScheduleConfig(100, 1, 1)) == 100

    def test_zero_warmup_matches_ceiling(self):
        assert inference_count(ScheduleConfig(100, 10, 0)) == 10
        assert ideal_inference_count(ScheduleConfig(100, 10, 0)) == 10
        assert inference_count(ScheduleConfig(101, 10, 0)) == 11

    def test_counts_match_actual_queries(self):
        ds = cv_dataset(frames=60)
        cfg = ScheduleConfig(60, 7, 3)
        res = run_session(OracleTracker(ds, OracleConfig()), ds, cfg)
        assert res.tracker_calls == inference_count(cfg)
        assert res.sim_cost_ms == res.tracker_calls * 556.0


class TestRunSession:
    def test_noiseless_full_kalman_is_exact_after_warmup(self):
        ds = cv_dataset(frames=60, num_points=4, speed=1.0)
        tracker = OracleTracker(ds, OracleConfig(noise_std=0.0))
        params = KalmanParams(sigma_p=1e-12, sigma_m=1e-6)
        res = run_session(tracker, ds, ScheduleConfig(60, 5, 3), params=params)
        err = np.linalg.norm(res.positions - ds.positions, axis=-1)
        assert err[3:].max() < 1e-6

    def test_total_failure_is_dead_reckoning(self):
        ds = cv_dataset(frames=30, num_points=1, speed=1.0)
        windows = tuple((pid, 3, 30) for pid in ds.point_ids)
        tracker = OracleTracker(ds, OracleConfig(occlusion_windows=windows))
        params = KalmanParams()
        res = run_session(tracker, ds, ScheduleConfig(30, 5, 3), params=params)

        # Replay the warmup by hand, then propagate without updates.
        st = kalman.init_filter(*ds.positions[0, 0], params)
        motion = kalman.motion_model(params)
        meas = kalman.measurement_model(params)
        for t in (1, 2):
            st = kalman.predict(st, motion)
            st = kalman.update(st, *ds.positions[t, 0], meas, t)
        for t in range(3, 30):
            st = kalman.predict(st, motion)
            np.testing.assert_allclose(res.positions[t, 0], st.mean[:2], atol=1e-9)
            assert res.provenance[t, 0] in (Provenance.PREDICTED, Provenance.HELD_AFTER_FAILURE)
        assert res.failed_calls == 5  # keyframes 5, 10, 15, 20, 25 all fail

    def test_zoh_passthrough_when_every_frame_measured(self):
        ds = cv_dataset(frames=20, num_points=2)
        tracker = OracleTracker(ds, OracleConfig(noise_std=0.7, seed=5))
        res = run_session(
            tracker, ds, ScheduleConfig(20, 1, 1), PredictorKind.ZERO_ORDER_HOLD
        )
        for t in range(20):
            for m in tracker.query(t, ds.point_ids):
                j = ds.index_of(m.point_id)
                assert tuple(res.positions[t, j]) == (m.x, m.y)
        assert (res.provenance == Provenance.MEASURED).all()

    def test_keyframe_records_posterior_not_raw_measurement(self):
        ds = cv_dataset(frames=40, num_points=1, speed=1.0)
        tracker = OracleTracker(ds, OracleConfig(noise_std=1.0, seed=3))
        params = KalmanParams(sigma_m=1.0)
        res = run_session(tracker, ds, ScheduleConfig(40, 5, 3), params=params)

        st = kalman.init_filter(*(m := tracker.query(0, [0])[0], (m.x, m.y))[1], params)
        motion = kalman.motion_model(params)
        meas = kalman.measurement_model(params)
        for t in range(1, 40):
            st = kalman.predict(st, motion)
            if t < 3 or t % 5 == 0:
                z = tracker.query(t, [0])[0]
                st = kalman.update(st, z.x, z.y, meas, t)
                if t >= 3:
                    # Posterior, not the raw measurement.
                    np.testing.assert_allclose(res.positions[t, 0], st.mean[:2], atol=1e-9)
                    assert abs(res.positions[t, 0, 0] - z.x) > 1e-6

    def test_per_point_failures_are_independent(self):
        ds = cv_dataset(frames=30, num_points=3)
        solo = OracleTracker(ds, OracleConfig(noise_std=0.5, seed=7))
        flaky = OracleTracker(
            ds, OracleConfig(noise_std=0.5, seed=7, occlusion_windows=((1, 0, 30),))
        )
        clean = run_session(solo, ds, ScheduleConfig(30, 5, 3))
        dirty = run_session(flaky, ds, ScheduleConfig(30, 5, 3))
        for j in (0, 2):
            np.testing.assert_array_equal(clean.positions[:, j], dirty.positions[:, j])

    def test_point_order_permutation_is_bit_identical(self):
        ds = cv_dataset(frames=30, num_points=4, seed=9)
        perm = [2, 0, 3, 1]
        permuted = Dataset(
            positions=ds.positions[:, perm].copy(),
            visible=ds.visible[:, perm].copy(),
            point_ids=[ds.point_ids[i] for i in perm],
            width=ds.width,
            height=ds.height,
        )
        cfg = ScheduleConfig(30, 5, 3)
        a = run_session(OracleTracker(ds, OracleConfig(noise_std=1.0, seed=4)), ds, cfg)
        b = run_session(
            OracleTracker(permuted, OracleConfig(noise_std=1.0, seed=4)), permuted, cfg
        )
        for orig_j, new_j in enumerate(np.argsort(perm)):
            np.testing.assert_array_equal(a.positions[:, orig_j], b.positions[:, new_j])

    def test_transport_failure_marks_incomplete(self):
        ds = cv_dataset(frames=20, num_points=2)
        oracle = OracleTracker(ds, OracleConfig())
        script = {
            t: {pid: m for pid, m in zip(ds.point_ids, oracle.query(t, ds.point_ids))}
            for t in range(20)
        }
        tracker = ScriptedTracker(script, fail_at=10)
        res = run_session(tracker, ds, ScheduleConfig(20, 5, 3))
        assert res.incomplete
        assert res.completed_frames == 10
        assert res.tracker_calls == inference_count(ScheduleConfig(10, 5, 3))

    def test_degenerate_update_recorded_as_failure(self, monkeypatch):
        ds = cv_dataset(frames=12, num_points=1)
        tracker = OracleTracker(ds, OracleConfig())

        import ktrack.scheduler as sched_mod

        real_ingest = sched_mod.pred_mod.ingest
        calls = {"n": 0}

        def flaky_ingest(state, z, frame):
            if frame == 5:
                calls["n"] += 1
                raise DegenerateUpdateError("forced")
            return real_ingest(state, z, frame)

        monkeypatch.setattr(sched_mod.pred_mod, "ingest", flaky_ingest)
        res = run_session(tracker, ds, ScheduleConfig(12, 5, 3))
        assert calls["n"] == 1
        assert res.failed_calls == 1
        assert res.provenance[5, 0] == Provenance.HELD_AFTER_FAILURE

    def test_uninitialized_point_until_first_valid_measurement(self):
        ds = cv_dataset(frames=30, num_points=2)
        tracker = OracleTracker(ds, OracleConfig(occlusion_windows=((0, 0, 4),)))
        res = run_session(tracker, ds, ScheduleConfig(30, 5, 3))
        assert (res.provenance[:3, 0] == Provenance.HELD_AFTER_FAILURE).all()
        assert not res.pred_visible[:3, 0].any()
        np.testing.assert_array_equal(res.positions[:3, 0], 0.0)
        # First valid measurement is frame 5 (first queried frame >= 4).
        assert res.provenance[5, 0] == Provenance.MEASURED
        assert res.pred_visible[5, 0]

    def test_predicted_visibility_follows_measurement_gap(self):
        ds = cv_dataset(frames=40, num_points=1)
        windows = ((0, 10, 26),)
        tracker = OracleTracker(ds, OracleConfig(occlusion_windows=windows))
        res = run_session(tracker, ds, ScheduleConfig(40, 5, 3))
        # Last success at frame 5; visible through frame 10, invisible after.
        assert res.pred_visible[10, 0]
        assert not res.pred_visible[11:30, 0].any()
        assert res.pred_visible[30, 0]  # keyframe 30 succeeds again


class TestLinearInterpolationSession:
    def test_intermediates_are_exact_blends(self):
        ds = cv_dataset(frames=26, num_points=1, speed=1.0)
        tracker = OracleTracker(ds, OracleConfig(noise_std=0.8, seed=11))
        res = run_session(
            tracker, ds, ScheduleConfig(26, 5, 3), PredictorKind.LINEAR_INTERPOLATION
        )
        assert res.latency_frames == 5
        zs = {t: tracker.query(t, [0])[0] for t in range(26)}
        for a, b in [(5, 10), (10, 15), (15, 20)]:
            za, zb = zs[a], zs[b]
            for t in range(a + 1, b):
                u = (t - a) / (b - a)
                want = (za.x + u * (zb.x - za.x), za.y + u * (zb.y - za.y))
                np.testing.assert_allclose(res.positions[t, 0], want, atol=1e-12)
        # Keyframes echo their own measurement.
        np.testing.assert_allclose(res.positions[10, 0], (zs[10].x, zs[10].y))

    def test_tail_without_next_keyframe_holds(self):
        ds = cv_dataset(frames=24, num_points=1, speed=1.0)
        tracker = OracleTracker(ds, OracleConfig(noise_std=0.5, seed=1))
        res = run_session(
            tracker, ds, ScheduleConfig(24, 10, 3), PredictorKind.LINEAR_INTERPOLATION
        )
        z20 = tracker.query(20, [0])[0]
        for t in (21, 22, 23):
            np.testing.assert_allclose(res.positions[t, 0], (z20.x, z20.y))

    def test_failed_keyframe_interpolates_across(self):
        ds = cv_dataset(frames=22, num_points=1, speed=1.0)
        tracker = OracleTracker(
            ds, OracleConfig(noise_std=0.0, occlusion_windows=((0, 10, 11),))
        )
        res = run_session(
            tracker, ds, ScheduleConfig(22, 5, 3), PredictorKind.LINEAR_INTERPOLATION
        )
        assert res.provenance[10, 0] == Provenance.HELD_AFTER_FAILURE
        # Frames 6..14 blend 5 -> 15 (the failed keyframe included).
        z5 = ds.positions[5, 0]
        z15 = ds.positions[15, 0]
        for t in range(6, 15):
            u = (t - 5) / 10
            np.testing.assert_allclose(res.positions[t, 0], z5 + u * (z15 - z5), atol=1e-12)


class TestSpeedupAccounting:
    def test_simulated_speedup_matches_count_ratio(self):
        ds = cv_dataset(frames=100, num_points=2)
        cost = 556.0
        tracker = OracleTracker(ds, OracleConfig(cost_ms=cost))
        base = run_session(tracker, ds, ScheduleConfig(100, 1, 1))
        fast = run_session(tracker, ds, ScheduleConfig(100, 10, 3))
        speedup = base.sim_cost_ms / fast.sim_cost_ms
        count = inference_count(ScheduleConfig(100, 10, 3))
        assert speedup == pytest.approx(100 / count, rel=1e-9)
        assert abs(speedup - 100 / count) / (100 / count) < 0.01


class TestRunSweep:
    def test_cardinality(self):
        spec = TrajectorySpec(kind=TrajectoryKind.CONSTANT_VELOCITY, frames=30, num_points=2)
        cells = run_sweep(
            spec,
            OracleConfig(noise_std=0.5),
            ns=[3, 5],
            kinds=[PredictorKind.FULL_KALMAN],
            grid_sizes=[2],
            warmup=3,
            params=KalmanParams(),
        )
        assert len(cells) == 2
        assert all(c.report is not None and not c.error for c in cells)

    def test_baseline_convention(self):
        spec = TrajectorySpec(kind=TrajectoryKind.CONSTANT_VELOCITY, frames=30, num_points=2)
        cells = run_sweep(
            spec,
            OracleConfig(noise_std=0.5),
            ns=[0],
            kinds=[PredictorKind.FULL_KALMAN],
            grid_sizes=[2],
            warmup=3,
            params=KalmanParams(),
        )
        (cell,) = cells
        assert cell.n == 0
        assert cell.report.tracker_calls == 30
        assert cell.report.retention == pytest.approx(1.0)
        assert cell.report.speedup == pytest.approx(1.0)

    def test_retention_declines_with_interval(self):
        spec = TrajectorySpec(
            kind=TrajectoryKind.SINUSOIDAL,
            frames=120,
            num_points=8,
            amplitude=12.0,
            period=48.0,
            speed=1.0,
        )
        cells = run_sweep(
            spec,
            OracleConfig(noise_std=1.0),
            ns=[2, 15],
            kinds=[PredictorKind.FULL_KALMAN],
            grid_sizes=[8],
            warmup=3,
            params=KalmanParams(),
            seeds=(0, 1, 2),
        )
        by_n = {}
        for c in cells:
            by_n.setdefault(c.n, []).append(c.report.retention)
        assert np.mean(by_n[2]) > np.mean(by_n[15])
