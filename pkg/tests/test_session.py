"""Session simulator: the wiping scenario, passivity, determinism."""

import json
import math

import numpy as np
import pytest

from pantosim.data import study_bundle
from pantosim.errors import FormatError, TrajectoryError
from pantosim.linkage import geometry_from_spec, load_geometry, scale_up
from pantosim.proxy import signed_distance
from pantosim.session import (
    FOOTPRINT_RADIUS,
    HandSample,
    generate_raster_trajectory,
    load_scene,
    load_trajectory,
    make_scene,
    result_to_dict,
    run,
    save_scene,
    save_trajectory,
    scene_from_dict,
    scene_to_dict,
    set_plane_setpoint,
    step,
    tile_centers,
)


@pytest.fixture(scope="module")
def study():
    scene_path, geom_path = study_bundle("093")
    geom = load_geometry(geom_path)
    scene = load_scene(scene_path, geom)
    return scene, geom


class TestStep:
    def test_sweep_erases_tile(self, study):
        scene, geom = study
        cx, cy = tile_centers(scene.table, scene.tiles)
        target = np.array([cx[0], cy[0], scene.table.height - 0.002])
        scene2, record = step(scene, geom, HandSample(t=0.0, target=target), 0.005)
        assert record.contact.in_contact
        np.testing.assert_allclose(record.contact.active_constraints[0], [0, 0, 1])
        assert scene2.tiles.remaining == scene.tiles.total - 1
        assert record.tiles_remaining == scene.tiles.total - 1
        # constant hand-weight telemetry and the reaction scaling between nodes
        assert record.hand_weight_force == 8.93
        np.testing.assert_allclose(
            record.contact.reaction_interface,
            geom.alpha * record.contact.reaction_constraint,
            atol=1e-12,
        )
        assert record.contact.reaction_interface[2] == pytest.approx(8.93, abs=1e-9)

    def test_hover_above_table_transparent(self, study):
        scene, geom = study
        target = scene.table.center + np.array([0.0, 0.0, 0.05])
        scene2, record = step(scene, geom, HandSample(t=0.0, target=target), 0.005)
        assert not record.contact.in_contact
        np.testing.assert_array_equal(record.resolved_interface, record.raw_target)
        np.testing.assert_array_equal(record.raw_target, target)
        assert scene2.tiles.remaining == scene.tiles.total

    def test_press_below_rides_surface(self, study):
        scene, geom = study
        target = scene.table.center + np.array([0.0, 0.0, -0.03])
        _, record = step(scene, geom, HandSample(t=0.0, target=target), 0.005)
        assert record.resolved_interface[2] == pytest.approx(
            scene.table.height, abs=1e-9
        )
        assert record.contact.penetration_raw == pytest.approx(
            0.03 * geom.alpha, abs=1e-12
        )

    def test_scaling_consistency(self, study):
        scene, geom = study
        target = scene.table.center + np.array([0.05, -0.04, -0.01])
        _, record = step(scene, geom, HandSample(t=0.0, target=target), 0.005)
        np.testing.assert_allclose(
            record.resolved_interface,
            scale_up(geom, record.constraint_node),
            atol=1e-12,
        )

    def test_dt_positive(self, study):
        scene, geom = study
        with pytest.raises(ValueError):
            step(scene, geom, HandSample(t=0.0, target=scene.table.center), 0.0)


class TestRasterTrajectory:
    def test_coverage_of_every_tile_centre(self, study):
        scene, _ = study
        traj = generate_raster_trajectory(scene)
        pts = np.vstack([s.target[:2] for s in traj])
        cx, cy = tile_centers(scene.table, scene.tiles)
        for x, y in zip(cx, cy):
            d = np.min(np.hypot(pts[:, 0] - x, pts[:, 1] - y))
            assert d <= FOOTPRINT_RADIUS

    def test_duration_matches_path_length(self, study):
        scene, _ = study
        for speed in (0.25, 0.3):
            traj = generate_raster_trajectory(scene, speed=speed)
            # 10 lanes of 0.6 m plus 9 transitions of 0.03 m
            length = 10 * 0.6 + 9 * 0.03
            assert traj[-1].t == pytest.approx(length / speed, abs=2.0 / 200.0)

    def test_zero_lanes_error(self, study):
        scene, _ = study
        with pytest.raises(ValueError, match="zero lanes"):
            generate_raster_trajectory(scene, lane_overlap=1.0)

    def test_uncovered_rows_error(self, study):
        scene, _ = study
        with pytest.raises(ValueError, match="cover"):
            generate_raster_trajectory(scene, lane_overlap=-1.0)

    def test_timestamps_strictly_increasing(self, study):
        scene, _ = study
        traj = generate_raster_trajectory(scene)
        ts = np.array([s.t for s in traj])
        assert np.all(np.diff(ts) > 0)


class TestRun:
    def test_raster_erases_all_tiles(self, study):
        scene, geom = study
        traj = generate_raster_trajectory(scene)
        result = run(scene, geom, traj)
        assert result.metrics.tiles_erased == 100
        assert result.metrics.tiles_total == 100
        assert result.metrics.completion == 1.0
        assert result.metrics.max_penetration <= 1e-6

    def test_hover_erases_nothing(self, study):
        scene, geom = study
        traj = generate_raster_trajectory(scene, press_depth=-0.05)
        result = run(scene, geom, traj)
        assert result.metrics.tiles_erased == 0
        assert result.metrics.contact_events == 0

    def test_rerun_identical_bytes(self, study):
        scene, geom = study
        traj = generate_raster_trajectory(scene)
        a = json.dumps(result_to_dict(run(scene, geom, traj), geom), sort_keys=True)
        b = json.dumps(result_to_dict(run(scene, geom, traj), geom), sort_keys=True)
        assert a == b

    def test_empty_trajectory_rejected(self, study):
        scene, geom = study
        with pytest.raises(TrajectoryError):
            run(scene, geom, [])

    def test_non_monotone_rejected(self, study):
        scene, geom = study
        c = scene.table.center + np.array([0, 0, 0.1])
        traj = [HandSample(t=0.0, target=c), HandSample(t=0.0, target=c)]
        with pytest.raises(TrajectoryError):
            run(scene, geom, traj)

    def test_tiles_monotone_and_conserved(self, study):
        scene, geom = study
        traj = generate_raster_trajectory(scene)
        result = run(scene, geom, traj)
        remaining = [r.tiles_remaining for r in result.records]
        assert all(a >= b for a, b in zip(remaining, remaining[1:]))
        assert remaining[0] <= 100 and remaining[-1] == 0

    def test_displayed_hand_bounded_by_table(self, study):
        scene, geom = study
        traj = generate_raster_trajectory(scene)
        result = run(scene, geom, traj)
        half_x = scene.table.size_x / 2.0
        half_y = scene.table.size_y / 2.0
        for r in result.records:
            p = r.resolved_interface
            over_table = (
                abs(p[0] - scene.table.center[0]) <= half_x
                and abs(p[1] - scene.table.center[1]) <= half_y
            )
            if over_table:
                assert p[2] >= scene.table.height - 1e-6

    def test_off_contact_transparency(self, study):
        scene, geom = study
        rng = np.random.default_rng(13)
        t = 0.0
        traj = []
        for _ in range(50):
            p = scene.table.center + rng.uniform(
                [-0.2, -0.1, 0.02], [0.2, 0.1, 0.15]
            )
            traj.append(HandSample(t=t, target=p))
            t += 0.02
        result = run(scene, geom, traj)
        for r in result.records:
            if not r.contact.in_contact:
                np.testing.assert_array_equal(r.resolved_interface, r.raw_target)


class TestPassivity:
    def test_actuator_trace_independent_of_contact(self, study):
        scene, geom = study
        contact_traj = generate_raster_trajectory(scene)
        hover_traj = generate_raster_trajectory(scene, press_depth=-0.05)
        # identical setpoint schedule (constant here); different hand motion
        res_contact = run(scene, geom, contact_traj)
        res_hover = run(scene, geom, hover_traj)
        trace_contact = [
            (r.actuator.command_speed, r.actuator.height, r.actuator.setpoint)
            for r in res_contact.records
        ]
        trace_hover = [
            (r.actuator.command_speed, r.actuator.height, r.actuator.setpoint)
            for r in res_hover.records
        ]
        assert trace_contact == trace_hover

    def test_moving_plane_trace_identical_under_contact(self, study):
        scene, geom = study
        # command the plane upward mid-session in both runs
        scene_moving = set_plane_setpoint(scene, geom, scene.table.height + 0.05)
        rng = np.random.default_rng(14)
        center = scene.table.center
        press = [
            HandSample(t=0.01 * k, target=center + np.array([0.0, 0.0, -0.02]))
            for k in range(200)
        ]
        away = [
            HandSample(
                t=0.01 * k,
                target=center + rng.uniform([-0.1, -0.1, 0.1], [0.1, 0.1, 0.2]),
            )
            for k in range(200)
        ]
        res_press = run(scene_moving, geom, press)
        res_away = run(scene_moving, geom, away)
        a = [(r.actuator.command_speed, r.actuator.height) for r in res_press.records]
        b = [(r.actuator.command_speed, r.actuator.height) for r in res_away.records]
        assert a == b


class TestSetPlaneSetpoint:
    def test_table_heights_with_default_geometry(self):
        geom = geometry_from_spec(base_position=(0.0, 0.0, 1.0))
        scene = make_scene(geom, table_center=(0.45, 0.0, 0.93))
        s2 = set_plane_setpoint(scene, geom, 0.93)
        assert s2.actuator.setpoint == pytest.approx(0.98488, abs=1e-9)
        s3 = set_plane_setpoint(scene, geom, 1.25)
        assert s3.actuator.setpoint == pytest.approx(1.054, abs=1e-9)

    def test_no_motion_when_converged(self, study):
        scene, geom = study
        s2 = set_plane_setpoint(scene, geom, scene.table.height)
        assert s2.actuator.setpoint == s2.actuator.height

    def test_out_of_span_rejected(self, study):
        scene, geom = study
        with pytest.raises(ValueError, match="span"):
            set_plane_setpoint(scene, geom, geom.base_position[2] + 1.0)

    def test_plane_converges_at_constraint_speed(self, study):
        scene, geom = study
        scene = set_plane_setpoint(scene, geom, scene.table.height + 0.04)
        heights = [scene.actuator.height]
        hover = scene.table.center + np.array([0.0, 0.0, 0.2])
        prev = None
        for k in range(1200):
            scene, record = step(
                scene, geom, HandSample(t=0.005 * k, target=hover), 0.005, prev
            )
            prev = record.constraint_node
            heights.append(scene.actuator.height)
        rates = np.abs(np.diff(heights)) / 0.005
        assert np.max(rates) <= 0.016 + 1e-12
        assert heights[-1] == pytest.approx(scene.actuator.setpoint, abs=1e-6)


class TestSceneIO:
    def test_roundtrip(self, study, tmp_path):
        scene, geom = study
        path = tmp_path / "scene.json"
        save_scene(scene, path)
        scene2 = load_scene(path, geom)
        assert scene_to_dict(scene2) == scene_to_dict(scene)

    def test_unknown_key_rejected(self, study):
        scene, geom = study
        data = scene_to_dict(scene)
        data["extra"] = 1
        with pytest.raises(FormatError, match="extra"):
            scene_from_dict(data, geom)

    def test_table_height_consistency_enforced(self, study):
        scene, geom = study
        data = scene_to_dict(scene)
        data["table"]["height_m"] = data["table"]["center_m"][2] + 0.1
        with pytest.raises(FormatError, match="height"):
            scene_from_dict(data, geom)

    def test_proxy_plane_derived_by_scale_down(self, study):
        scene, geom = study
        expected = geom.base_position[2] + geom.alpha * (
            scene.table.height - geom.base_position[2]
        )
        assert scene.proxy.height == pytest.approx(expected, abs=1e-12)
        assert scene.actuator.height == scene.proxy.height


class TestTrajectoryIO:
    def test_roundtrip(self, study, tmp_path):
        scene, _ = study
        traj = generate_raster_trajectory(scene)[:50]
        path = tmp_path / "traj.csv"
        save_trajectory(traj, path)
        loaded = load_trajectory(path)
        assert len(loaded) == len(traj)
        for a, b in zip(traj, loaded):
            assert a.t == b.t
            np.testing.assert_array_equal(a.target, b.target)
            assert a.handle_pitch == b.handle_pitch
            assert a.handle_yaw == b.handle_yaw

    def test_four_column_form_accepted(self, tmp_path):
        path = tmp_path / "traj.csv"
        path.write_text("t_s,x_m,y_m,z_m\n0.0,0.1,0.2,0.3\n0.1,0.1,0.2,0.4\n")
        traj = load_trajectory(path)
        assert len(traj) == 2
        assert traj[0].handle_pitch == 0.0

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "traj.csv"
        path.write_text("time,x,y,z\n0,0,0,0\n")
        with pytest.raises(FormatError, match="header"):
            load_trajectory(path)

    def test_non_monotone_rejected(self, tmp_path):
        path = tmp_path / "traj.csv"
        path.write_text("t_s,x_m,y_m,z_m\n0.1,0,0,0\n0.1,0,0,1\n")
        with pytest.raises(TrajectoryError):
            load_trajectory(path)
