"""Invariant suites behind ``pantosim verify``.

Each suite returns (name, ok, detail).  Setting PANTOSIM_FAULT=bar_length
injects a length perturbation into the bar-rigidity check so the pipeline
can prove the suite actually bites.
"""

from __future__ import annotations

import dataclasses
import os

import numpy as np

from .actuator import ActuatorState, apply_axial_load, step_actuator
from .errors import UnreachableError
from .linkage import (
    LinkageGeometry,
    forward_kinematics,
    inverse_kinematics,
    inverse_map_velocity,
    jacobian,
    map_force,
    map_velocity,
    sample_joint_states,
    sample_reachable_points,
)


def check_pantograph_identity(geom: LinkageGeometry, n: int = 2000, seed: int = 1):
    worst = 0.0
    for q in sample_joint_states(geom, n, seed=seed):
        pose = forward_kinematics(geom, q)
        dev = np.linalg.norm(
            (pose.L - pose.O) - geom.alpha * (pose.E - pose.O)
        )
        worst = max(worst, float(dev))
    ok = worst <= 1e-12
    return "pantograph-identity", ok, f"max deviation {worst:.3e} m"


def check_bar_rigidity(geom: LinkageGeometry, n: int = 2000, seed: int = 2):
    nominal = np.array(
        [
            (1.0 - geom.alpha) * geom.l1,
            geom.alpha * geom.l2,
            (1.0 - geom.alpha) * geom.l1,
            geom.alpha * geom.l2,
        ]
    )
    inject = 1e-6 if os.environ.get("PANTOSIM_FAULT") == "bar_length" else 0.0
    worst = 0.0
    for q in sample_joint_states(geom, n, seed=seed):
        pose = forward_kinematics(geom, q)
        lengths = np.array(
            [
                np.linalg.norm(pose.A - pose.B),
                np.linalg.norm(pose.D - pose.A),
                np.linalg.norm(pose.L - pose.D),
                np.linalg.norm(pose.B - pose.L),
            ]
        )
        worst = max(worst, float(np.max(np.abs(lengths + inject - nominal))))
    ok = worst <= 1e-12
    return "bar-rigidity", ok, f"max length deviation {worst:.3e} m"


def check_fk_ik(geom: LinkageGeometry, n: int = 1000, seed: int = 3):
    pts = sample_reachable_points(geom, n, seed=seed)
    worst = 0.0
    for p in pts:
        q = inverse_kinematics(geom, p)
        err = float(np.linalg.norm(forward_kinematics(geom, q).E - p))
        worst = max(worst, err)
    # a point past the outer radius must be rejected
    outside = geom.base_position + np.array([geom.r_max * 1.2, 0.0, 0.0])
    try:
        inverse_kinematics(geom, outside)
        return "fk-ik-roundtrip", False, "IK accepted an out-of-workspace target"
    except UnreachableError:
        pass
    ok = worst <= 1e-9
    return "fk-ik-roundtrip", ok, f"max roundtrip error {worst:.3e} m"


def finite_difference_jacobian(geom: LinkageGeometry, q, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the interface node; the oracle for
    the analytic one.  Perturbed states must stay inside all limits."""
    Jfd = np.empty((3, 3))
    for col, field in enumerate(("theta", "a1", "a2")):
        qp = dataclasses.replace(q, **{field: getattr(q, field) + h})
        qm = dataclasses.replace(q, **{field: getattr(q, field) - h})
        fp = forward_kinematics(geom, qp).E
        fm = forward_kinematics(geom, qm).E
        Jfd[:, col] = (fp - fm) / (2.0 * h)
    return Jfd


def check_jacobian(geom: LinkageGeometry, n: int = 200, seed: int = 4):
    h = 1e-6
    worst = 0.0
    checked = 0
    for q in sample_joint_states(geom, n * 2, seed=seed):
        if checked >= n:
            break
        try:
            Jfd = finite_difference_jacobian(geom, q, h)
        except Exception:
            # perturbation crossed a limit; interior samples are plentiful
            continue
        J = jacobian(geom, q)
        worst = max(worst, float(np.max(np.abs(J - Jfd))))
        checked += 1
    ok = worst <= 1e-6 and checked >= n // 2
    return "jacobian-vs-fd", ok, f"max entry deviation {worst:.3e} over {checked} states"


def check_power_balance(geom: LinkageGeometry, n: int = 2000, seed: int = 5):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        f = rng.uniform(-50.0, 50.0, size=3)
        v = rng.uniform(-2.0, 2.0, size=3)
        p_i = float(np.dot(f, v))
        p_c = float(np.dot(map_force(geom, f), map_velocity(geom, v)))
        rel = abs(p_i - p_c) / max(1.0, abs(p_i))
        worst = max(worst, rel)
    ok = worst <= 1e-12
    return "power-balance", ok, f"max relative imbalance {worst:.3e}"


def check_self_locking(_geom: LinkageGeometry, steps: int = 1000):
    st = ActuatorState(height=0.98, setpoint=0.98)
    st = apply_axial_load(st, 300.0)
    h0 = st.height
    for _ in range(steps):
        st = step_actuator(st, 0.005)
    ok = st.height == h0
    return "self-locking", ok, f"height drift {st.height - h0!r} m under 300 N"


def check_velocity_map(geom: LinkageGeometry):
    up = float(inverse_map_velocity(geom, np.array([0.0, 0.0, 0.016]))[2])
    dn = float(inverse_map_velocity(geom, np.array([0.0, 0.0, -0.020]))[2])
    ok = abs(up - 0.016 / geom.alpha) < 1e-15 and abs(dn + 0.020 / geom.alpha) < 1e-15
    return "velocity-map", ok, f"rendered speeds {up:.4f} / {dn:.4f} m/s"


ALL_SUITES = (
    check_pantograph_identity,
    check_bar_rigidity,
    check_fk_ik,
    check_jacobian,
    check_power_balance,
    check_self_locking,
    check_velocity_map,
)


def run_all(geom: LinkageGeometry):
    """Run every suite; returns list of (name, ok, detail)."""
    return [suite(geom) for suite in ALL_SUITES]
