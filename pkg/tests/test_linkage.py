"""Linkage kinematics: geometry solve, FK/IK, scaling laws, workspace."""

import dataclasses
import math

import numpy as np
import pytest

from pantosim.errors import FormatError, GeometryError, JointLimitError, UnreachableError
from pantosim.linkage import (
    JointState,
    LinkageGeometry,
    clamp_to_workspace,
    forward_kinematics,
    geometry_from_dict,
    geometry_from_spec,
    geometry_to_dict,
    inverse_kinematics,
    inverse_map_force,
    inverse_map_velocity,
    jacobian,
    constraint_jacobian,
    load_geometry,
    map_force,
    map_velocity,
    sample_joint_states,
    sample_reachable_points,
    save_geometry,
    scale_down,
    scale_up,
    workspace_contains,
    workspace_report,
)
from pantosim.verify import finite_difference_jacobian


def wide_geometry(l1=0.518, l2=0.225, alpha=0.216, base=(0.0, 0.0, 0.0)):
    """Test geometry with wide-open limits (matches the worked examples)."""
    return LinkageGeometry(
        alpha=alpha,
        l1=l1,
        l2=l2,
        azimuth_limit=math.pi,
        elevation_min=-1.2,
        elevation_max=1.2,
        elbow_min=0.0,
        elbow_max=math.pi,
        base_position=np.asarray(base, dtype=float),
    )


def solve_geometry_by_bisection(r_min, r_max, solid_angle, elbow, az_lim):
    """Independent oracle: scan l1, derive l2 from the outer-reach equation,
    bisect on the inner-reach residual; elevation from the band equation."""
    c_hi = math.cos(elbow[0])
    c_lo = math.cos(elbow[1])

    def l2_from_l1(l1):
        # r_max^2 = l1^2 + l2^2 + 2 l1 l2 c_hi, quadratic in l2
        a, b, c = 1.0, 2.0 * l1 * c_hi, l1 * l1 - r_max * r_max
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            return None
        l2 = (-b + math.sqrt(disc)) / 2.0
        return l2 if l2 > 0.0 else None

    def inner_residual(l1):
        l2 = l2_from_l1(l1)
        if l2 is None or l2 >= l1:
            return None
        r = math.sqrt(l1 * l1 + l2 * l2 + 2.0 * l1 * l2 * c_lo)
        return r - r_min

    # bracket by scanning: small l1 gives l2 >= l1 (invalid) or r < r_min
    grid = [r_max * (0.3 + 0.7 * k / 400.0) for k in range(401)]
    vals = [(l1, inner_residual(l1)) for l1 in grid]
    vals = [(l1, f) for l1, f in vals if f is not None]
    lo = hi = None
    for (l1a, fa), (l1b, fb) in zip(vals, vals[1:]):
        if fa * fb <= 0.0:
            lo, flo, hi = l1a, fa, l1b
            break
    assert lo is not None, "oracle found no sign change"
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = inner_residual(mid)
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    l1 = 0.5 * (lo + hi)
    l2 = l2_from_l1(l1)
    e = math.asin(solid_angle / (4.0 * az_lim))
    return l1, l2, e


class TestGeometryFromSpec:
    def test_default_solve_matches_bisection_oracle(self):
        elbow = (math.radians(30.0), math.radians(150.0))
        az = math.radians(60.0)
        l1o, l2o, eo = solve_geometry_by_bisection(0.342, 0.722, 2.33, elbow, az)
        g = geometry_from_spec()
        assert g.l1 == pytest.approx(l1o, abs=1e-9)
        assert g.l2 == pytest.approx(l2o, abs=1e-9)
        assert g.elevation_max == pytest.approx(eo, abs=1e-12)
        # headline numbers
        assert g.l1 == pytest.approx(0.518, abs=1e-3)
        assert g.l2 == pytest.approx(0.225, abs=1e-3)
        assert math.degrees(g.elevation_max) == pytest.approx(33.81, abs=0.05)

    def test_reach_bounds_reproduced(self):
        g = geometry_from_spec()
        assert g.r_min == pytest.approx(0.342, abs=1e-12)
        assert g.r_max == pytest.approx(0.722, abs=1e-12)

    def test_full_extension_limits(self):
        # elbow [0, pi]: l1 + l2 = r_max and l1 - l2 = r_min
        g = geometry_from_spec(elbow_limits=(0.0, math.pi))
        assert g.l1 == pytest.approx(0.532, abs=1e-12)
        assert g.l2 == pytest.approx(0.190, abs=1e-12)

    def test_zero_solid_angle_rejected(self):
        with pytest.raises(GeometryError, match="empty elevation band"):
            geometry_from_spec(solid_angle=0.0)

    def test_oversized_solid_angle_names_equation(self):
        with pytest.raises(GeometryError, match="sin-span"):
            geometry_from_spec(solid_angle=10.0, azimuth_limit=math.radians(60.0))

    def test_infeasible_reach_names_equation(self):
        with pytest.raises(GeometryError, match="cos"):
            geometry_from_spec(r_min=0.70, r_max=0.722, elbow_limits=(0.5, 0.6))


class TestForwardKinematics:
    def test_fully_extended_along_radial_axis(self):
        g = wide_geometry()
        pose = forward_kinematics(g, JointState(0.0, 0.0, 0.0))
        np.testing.assert_allclose(pose.E, [0.743, 0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(pose.L, [0.160488, 0.0, 0.0], atol=1e-12)

    def test_azimuth_rotation(self):
        g = wide_geometry()
        pose = forward_kinematics(g, JointState(math.pi / 2.0, 0.0, 0.0))
        np.testing.assert_allclose(pose.E, [0.0, 0.743, 0.0], atol=1e-12)

    def test_scale_ratio_exact_for_random_states(self):
        g = wide_geometry()
        for q in sample_joint_states(g, 200, seed=11):
            pose = forward_kinematics(g, q)
            ratio = np.linalg.norm(pose.L - pose.O) / np.linalg.norm(pose.E - pose.O)
            assert ratio == pytest.approx(0.216, abs=1e-12)

    def test_collinear_and_bar_lengths(self):
        g = wide_geometry()
        nominal = [
            (1 - g.alpha) * g.l1,
            g.alpha * g.l2,
            (1 - g.alpha) * g.l1,
            g.alpha * g.l2,
        ]
        for q in sample_joint_states(g, 100, seed=12):
            pose = forward_kinematics(g, q)
            cross = np.linalg.norm(np.cross(pose.L - pose.O, pose.E - pose.O))
            assert cross < 1e-12
            lengths = [
                np.linalg.norm(pose.A - pose.B),
                np.linalg.norm(pose.D - pose.A),
                np.linalg.norm(pose.L - pose.D),
                np.linalg.norm(pose.B - pose.L),
            ]
            np.testing.assert_allclose(lengths, nominal, atol=1e-12)

    def test_limit_violation_names_joint(self):
        g = geometry_from_spec()
        with pytest.raises(JointLimitError, match="theta"):
            forward_kinematics(g, JointState(2.0, 0.0, math.radians(90)))
        with pytest.raises(JointLimitError, match="a2"):
            forward_kinematics(g, JointState(0.0, 0.0, math.radians(20)))
        with pytest.raises(JointLimitError, match="elevation"):
            forward_kinematics(g, JointState(0.0, 1.2, math.radians(90)))


class TestInverseKinematics:
    def test_full_extension_boundary(self):
        g = wide_geometry()
        q = inverse_kinematics(g, [0.743, 0.0, 0.0])
        assert q.theta == 0.0
        assert q.a2 == pytest.approx(g.elbow_min, abs=1e-6)
        assert q.handle_pitch == 0.0 and q.handle_yaw == 0.0

    def test_unreachable_carries_nearest_point(self):
        g = geometry_from_spec(base_position=(0.0, 0.0, 0.0))
        with pytest.raises(UnreachableError) as exc:
            inverse_kinematics(g, [0.80, 0.0, 0.0])
        nearest = exc.value.nearest
        assert np.linalg.norm(nearest) == pytest.approx(0.722, abs=1e-9)
        np.testing.assert_allclose(nearest, [0.722, 0.0, 0.0], atol=1e-9)

    def test_roundtrip_on_random_workspace_points(self):
        g = geometry_from_spec()
        worst = 0.0
        for p in sample_reachable_points(g, 1000, seed=21):
            q = inverse_kinematics(g, p)
            err = np.linalg.norm(forward_kinematics(g, q).E - p)
            worst = max(worst, err)
        assert worst < 1e-9

    def test_rejects_exactly_the_workspace_complement(self):
        g = geometry_from_spec()
        rng = np.random.default_rng(22)
        pts = g.base_position + rng.uniform(-1.0, 1.0, size=(500, 3))
        for p in pts:
            inside = workspace_contains(g, p)
            try:
                inverse_kinematics(g, p)
                assert inside
            except UnreachableError:
                assert not inside


class TestScaling:
    def test_scale_down_example(self):
        g = geometry_from_spec(base_position=(0.0, 0.0, 0.0))
        np.testing.assert_allclose(
            scale_down(g, [0.5, 0.0, 0.2]), [0.108, 0.0, 0.0432], atol=1e-15
        )

    def test_scale_up_inverse(self):
        g = geometry_from_spec(base_position=(0.0, 0.0, 0.0))
        np.testing.assert_allclose(
            scale_up(g, [0.108, 0.0, 0.0432]), [0.5, 0.0, 0.2], atol=1e-12
        )
        rng = np.random.default_rng(3)
        for p in rng.uniform(-2, 2, size=(100, 3)):
            np.testing.assert_allclose(scale_up(g, scale_down(g, p)), p, atol=1e-12)

    def test_table_height_transforms(self):
        g = geometry_from_spec(base_position=(0.0, 0.0, 1.0))
        assert scale_down(g, [0.0, 0.0, 0.93])[2] == pytest.approx(0.98488, abs=1e-9)
        assert scale_down(g, [0.0, 0.0, 1.25])[2] == pytest.approx(1.054, abs=1e-9)

    def test_velocity_map(self):
        g = geometry_from_spec()
        # derived rendered speeds; the hardware datasheet rounds to 7.5/9.5 cm/s
        up = inverse_map_velocity(g, [0.0, 0.0, 0.016])[2]
        dn = inverse_map_velocity(g, [0.0, 0.0, -0.020])[2]
        assert up == pytest.approx(0.0741, abs=5e-5)
        assert dn == pytest.approx(-0.0926, abs=5e-5)
        np.testing.assert_allclose(map_velocity(g, [0.0, 0.0, 0.0]), 0.0)

    def test_force_map(self):
        g = geometry_from_spec()
        f = map_force(g, [0.0, 0.0, -64.0])
        assert abs(f[2]) == pytest.approx(296.3, abs=0.1)
        np.testing.assert_allclose(map_force(g, np.zeros(3)), 0.0)
        np.testing.assert_allclose(
            inverse_map_force(g, f), [0.0, 0.0, -64.0], atol=1e-12
        )

    def test_power_balance_random_pairs(self):
        g = geometry_from_spec()
        rng = np.random.default_rng(4)
        for _ in range(2000):
            f = rng.uniform(-50, 50, size=3)
            v = rng.uniform(-2, 2, size=3)
            p_i = float(np.dot(f, v))
            p_c = float(np.dot(map_force(g, f), map_velocity(g, v)))
            assert abs(p_i - p_c) <= 1e-12 * max(1.0, abs(p_i))


class TestJacobian:
    def test_matches_finite_differences(self):
        g = geometry_from_spec()
        checked = 0
        for q in sample_joint_states(g, 100, seed=31):
            try:
                Jfd = finite_difference_jacobian(g, q)
            except JointLimitError:
                continue
            J = jacobian(g, q)
            np.testing.assert_allclose(J, Jfd, atol=1e-6)
            checked += 1
        assert checked >= 50

    def test_straight_arm_singularity_rank_drop(self):
        g = wide_geometry()
        J = jacobian(g, JointState(0.0, 0.1, 0.0))
        assert np.linalg.matrix_rank(J, tol=1e-9) == 2

    def test_constraint_jacobian_is_scaled(self):
        g = geometry_from_spec()
        q = sample_joint_states(g, 1, seed=32)[0]
        np.testing.assert_allclose(
            constraint_jacobian(g, q), 0.216 * jacobian(g, q), atol=1e-15
        )

    def test_velocity_map_equals_jacobian_propagation(self):
        g = geometry_from_spec()
        rng = np.random.default_rng(33)
        for q in sample_joint_states(g, 20, seed=34):
            qdot = rng.uniform(-1, 1, size=3)
            v_i = jacobian(g, q) @ qdot
            v_c = constraint_jacobian(g, q) @ qdot
            np.testing.assert_allclose(map_velocity(g, v_i), v_c, atol=1e-12)


class TestPathScaling:
    def test_constraint_polyline_is_scaled_interface_polyline(self):
        g = geometry_from_spec()
        states = sample_joint_states(g, 50, seed=41)
        e_path = np.array([forward_kinematics(g, q).E for q in states])
        l_path = np.array([forward_kinematics(g, q).L for q in states])
        expected = g.base_position + g.alpha * (e_path - g.base_position)
        np.testing.assert_allclose(l_path, expected, atol=1e-12)


class TestWorkspace:
    def test_report_reproduces_radii_and_solid_angle(self):
        g = geometry_from_spec()
        rep = workspace_report(g, 100_000, seed=7)
        assert rep.r_min == pytest.approx(0.342, abs=1e-3)
        assert rep.r_max == pytest.approx(0.722, abs=1e-3)
        assert rep.solid_angle_analytic == pytest.approx(2.33, abs=0.005)
        assert abs(rep.solid_angle_mc - rep.solid_angle_analytic) <= 3.0 * rep.mc_stderr
        assert rep.mc_stderr < 0.02

    def test_full_sphere(self):
        g = LinkageGeometry(
            alpha=0.216,
            l1=0.518,
            l2=0.225,
            azimuth_limit=math.pi,
            elevation_min=-math.pi / 2.0,
            elevation_max=math.pi / 2.0,
            elbow_min=0.0,
            elbow_max=math.pi,
            base_position=np.zeros(3),
        )
        rep = workspace_report(g, 2000, seed=8)
        assert rep.solid_angle_analytic == pytest.approx(4.0 * math.pi, abs=1e-12)
        assert rep.solid_angle_mc == pytest.approx(4.0 * math.pi, abs=1e-12)

    def test_sample_count_precondition(self):
        g = geometry_from_spec()
        with pytest.raises(ValueError):
            workspace_report(g, 999)

    def test_clamp_is_identity_inside(self):
        g = geometry_from_spec()
        for p in sample_reachable_points(g, 100, seed=9):
            clamped = clamp_to_workspace(g, p)
            assert np.all(clamped == p)


class TestGeometryIO:
    def test_roundtrip_identity(self, tmp_path):
        g = geometry_from_spec()
        path = tmp_path / "geom.json"
        save_geometry(g, path)
        g2 = load_geometry(path)
        assert geometry_to_dict(g) == geometry_to_dict(g2)

    def test_unknown_key_rejected(self):
        data = geometry_to_dict(geometry_from_spec())
        data["surprise"] = 1
        with pytest.raises(FormatError, match="surprise"):
            geometry_from_dict(data)

    def test_missing_key_rejected(self):
        data = geometry_to_dict(geometry_from_spec())
        del data["alpha"]
        with pytest.raises(FormatError, match="alpha"):
            geometry_from_dict(data)

    def test_invalid_alpha_rejected(self):
        data = geometry_to_dict(geometry_from_spec())
        data["alpha"] = 0.0
        with pytest.raises(GeometryError, match="alpha"):
            geometry_from_dict(data)
