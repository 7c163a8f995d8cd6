"""3D pantograph linkage: geometry, kinematics, scaling laws, workspace.

The device is a parallelogram pantograph swept about a vertical base axis.
Base-relative points live in a plane selected by the azimuth ``theta``; the
shoulder bar O-A (length l1) and elbow bar A-E (length l2, elbow angle a2
measured from the shoulder direction) place the interface node E.  The
parallelogram points B, D, L satisfy L - O = alpha * (E - O), so the
constraint node L traces a scaled copy of every interface-node path.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from . import kernels
from .errors import FormatError, GeometryError, JointLimitError, UnreachableError

WORKSPACE_TOL = 1e-9


@dataclasses.dataclass(frozen=True)
class LinkageGeometry:
    """Static parameters of the pantograph; lengths in metres, angles in radians."""

    alpha: float
    l1: float
    l2: float
    azimuth_limit: float
    elevation_min: float
    elevation_max: float
    elbow_min: float
    elbow_max: float
    base_position: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "base_position", np.asarray(self.base_position, dtype=float)
        )
        if self.base_position.shape != (3,):
            raise GeometryError("base_position must be a 3-vector")
        if not 0.0 < self.alpha < 1.0:
            raise GeometryError(f"alpha must be in (0, 1), got {self.alpha}")
        if not self.l1 > self.l2 > 0.0:
            raise GeometryError(f"need l1 > l2 > 0, got l1={self.l1}, l2={self.l2}")
        if not 0.0 <= self.elbow_min < self.elbow_max <= math.pi:
            raise GeometryError(
                f"elbow limits must satisfy 0 <= min < max <= pi, got "
                f"[{self.elbow_min}, {self.elbow_max}]"
            )
        if not 0.0 < self.azimuth_limit <= math.pi:
            raise GeometryError(
                f"azimuth_limit must be in (0, pi], got {self.azimuth_limit}"
            )
        half_pi = math.pi / 2.0
        if not (
            -half_pi <= self.elevation_min < self.elevation_max <= half_pi
        ):
            raise GeometryError(
                f"elevation limits must satisfy -pi/2 <= min < max <= pi/2, got "
                f"[{self.elevation_min}, {self.elevation_max}]"
            )
        if not self.r_min > 0.0:
            raise GeometryError("reach bounds give r_min <= 0")

    def _reach(self, elbow: float) -> float:
        return math.sqrt(
            self.l1 * self.l1
            + self.l2 * self.l2
            + 2.0 * self.l1 * self.l2 * math.cos(elbow)
        )

    @property
    def r_min(self) -> float:
        return self._reach(self.elbow_max)

    @property
    def r_max(self) -> float:
        return self._reach(self.elbow_min)

    @property
    def solid_angle(self) -> float:
        """Analytic solid angle of the direction sector, steradians."""
        return (
            2.0
            * self.azimuth_limit
            * (math.sin(self.elevation_max) - math.sin(self.elevation_min))
        )


@dataclasses.dataclass(frozen=True)
class JointState:
    """Joint coordinates; theta is the base azimuth, a2 the elbow angle."""

    theta: float
    a1: float
    a2: float
    handle_pitch: float = 0.0
    handle_yaw: float = 0.0


@dataclasses.dataclass(frozen=True)
class LinkagePose:
    """World positions of the construction points for one joint state."""

    O: np.ndarray
    A: np.ndarray
    E: np.ndarray
    B: np.ndarray
    D: np.ndarray
    L: np.ndarray

    @property
    def interface_node(self) -> np.ndarray:
        return self.E

    @property
    def constraint_node(self) -> np.ndarray:
        return self.L

    @property
    def bar_points(self) -> dict:
        return {"O": self.O, "A": self.A, "E": self.E, "B": self.B, "D": self.D, "L": self.L}


@dataclasses.dataclass(frozen=True)
class WorkspaceReport:
    r_min: float
    r_max: float
    solid_angle_analytic: float
    solid_angle_mc: float
    mc_samples: int
    mc_stderr: float


def geometry_from_spec(
    r_min: float = 0.342,
    r_max: float = 0.722,
    solid_angle: float = 2.33,
    alpha: float = 0.216,
    elbow_limits: tuple[float, float] = (math.radians(30.0), math.radians(150.0)),
    azimuth_limit: float = math.radians(60.0),
    base_position=(0.0, 0.0, 1.0),
) -> LinkageGeometry:
    """Solve link lengths and elevation band from workspace-level numbers.

    Closed form: l1^2 + l2^2 + 2*l1*l2*cos(elbow) = r^2 at each elbow limit
    gives the lengths; 2*azimuth_limit*(sin(e) - sin(-e)) = solid_angle gives
    the symmetric elevation band.
    """
    if not 0.0 < r_min < r_max:
        raise GeometryError(f"need 0 < r_min < r_max, got {r_min}, {r_max}")
    elbow_min, elbow_max = elbow_limits
    if not 0.0 <= elbow_min < elbow_max <= math.pi:
        raise GeometryError(
            f"elbow limits must satisfy 0 <= min < max <= pi, got {elbow_limits}"
        )
    if not 0.0 < azimuth_limit <= math.pi:
        raise GeometryError(f"azimuth_limit must be in (0, pi], got {azimuth_limit}")
    c_hi = math.cos(elbow_min)
    c_lo = math.cos(elbow_max)
    # product and sum-of-squares of the link lengths from the two reach equations
    prod = (r_max * r_max - r_min * r_min) / (2.0 * (c_hi - c_lo))
    sumsq = r_max * r_max - 2.0 * prod * c_hi
    plus = sumsq + 2.0 * prod
    minus = sumsq - 2.0 * prod
    if prod <= 0.0 or sumsq <= 0.0 or plus <= 0.0 or minus < 0.0:
        raise GeometryError(
            "no positive l1, l2 solve l1^2 + l2^2 + 2*l1*l2*cos(elbow) = r^2 "
            f"at elbow limits {elbow_limits} for reach ({r_min}, {r_max})"
        )
    l1 = (math.sqrt(plus) + math.sqrt(minus)) / 2.0
    l2 = (math.sqrt(plus) - math.sqrt(minus)) / 2.0
    if not l1 > l2 > 0.0:
        raise GeometryError(
            "reach equations admit only l1 == l2; need distinct link lengths"
        )
    if solid_angle <= 0.0:
        raise GeometryError("empty elevation band: solid_angle must be > 0")
    sin_span = solid_angle / (2.0 * azimuth_limit)
    if sin_span > 2.0:
        raise GeometryError(
            "elevation band equation 2*azimuth_limit*(sin e_max - sin e_min) = "
            f"solid_angle needs sin-span {sin_span:.6g} > 2"
        )
    e_max = math.asin(sin_span / 2.0)
    return LinkageGeometry(
        alpha=alpha,
        l1=l1,
        l2=l2,
        azimuth_limit=azimuth_limit,
        elevation_min=-e_max,
        elevation_max=e_max,
        elbow_min=elbow_min,
        elbow_max=elbow_max,
        base_position=np.asarray(base_position, dtype=float),
    )


def check_joint_limits(geom: LinkageGeometry, q: JointState) -> None:
    """Raise JointLimitError naming the offending joint (elevation included)."""
    if not -geom.azimuth_limit <= q.theta <= geom.azimuth_limit:
        raise JointLimitError("theta", q.theta, -geom.azimuth_limit, geom.azimuth_limit)
    if not geom.elbow_min <= q.a2 <= geom.elbow_max:
        raise JointLimitError("a2", q.a2, geom.elbow_min, geom.elbow_max)
    # elevation of the interface-node direction in the pantograph plane
    er = geom.l1 * math.cos(q.a1) + geom.l2 * math.cos(q.a1 + q.a2)
    ev = geom.l1 * math.sin(q.a1) + geom.l2 * math.sin(q.a1 + q.a2)
    el = math.atan2(ev, er)
    if not geom.elevation_min - WORKSPACE_TOL <= el <= geom.elevation_max + WORKSPACE_TOL:
        raise JointLimitError("elevation", el, geom.elevation_min, geom.elevation_max)


def forward_kinematics(geom: LinkageGeometry, q: JointState) -> LinkagePose:
    """Construct the bar points for a joint state inside the limits."""
    check_joint_limits(geom, q)
    b = geom.base_position
    pts = kernels.fk_points(
        geom.alpha, geom.l1, geom.l2, b[0], b[1], b[2], q.theta, q.a1, q.a2
    )
    return LinkagePose(O=pts[0], A=pts[1], E=pts[2], B=pts[3], D=pts[4], L=pts[5])


def workspace_contains(geom: LinkageGeometry, p, tol: float = WORKSPACE_TOL) -> bool:
    """Shell-sector membership of a world point."""
    d = np.asarray(p, dtype=float) - geom.base_position
    return kernels.in_sector(
        d[0],
        d[1],
        d[2],
        geom.r_min,
        geom.r_max,
        geom.azimuth_limit,
        geom.elevation_min,
        geom.elevation_max,
        tol,
    )


def clamp_to_workspace(geom: LinkageGeometry, p) -> np.ndarray:
    """Clamp a world point into the shell sector (spherical-coordinate clamp).

    In-workspace points come back bit-identical.  For radial violations the
    result is the exact Euclidean nearest point; for angular violations it is
    the angular clamp, which is the deterministic policy used throughout.
    """
    p = np.asarray(p, dtype=float)
    d = p - geom.base_position
    x, y, z = kernels.clamp_to_sector(
        d[0],
        d[1],
        d[2],
        geom.r_min,
        geom.r_max,
        geom.azimuth_limit,
        geom.elevation_min,
        geom.elevation_max,
    )
    if x == d[0] and y == d[1] and z == d[2]:
        return p
    return geom.base_position + np.array([x, y, z])


def inverse_kinematics(geom: LinkageGeometry, target_interface) -> JointState:
    """Joint state whose interface node reaches the target; handle zeroed.

    Elbow-positive branch; raises UnreachableError carrying the nearest
    in-workspace point when the target is outside the shell sector.
    """
    target = np.asarray(target_interface, dtype=float)
    if not workspace_contains(geom, target):
        nearest = clamp_to_workspace(geom, target)
        raise UnreachableError(
            f"target {target.tolist()} outside workspace", nearest=nearest
        )
    d = target - geom.base_position
    theta, a1, a2, _ = kernels.ik_angles(geom.l1, geom.l2, d[0], d[1], d[2])
    # membership tolerance can leave the elbow a hair outside its limits
    a2 = min(max(a2, geom.elbow_min), geom.elbow_max)
    theta = min(max(theta, -geom.azimuth_limit), geom.azimuth_limit)
    return JointState(theta=theta, a1=a1, a2=a2)


def scale_down(geom: LinkageGeometry, p_rendered) -> np.ndarray:
    """Interface-space point to constraint-space point about the base."""
    p = np.asarray(p_rendered, dtype=float)
    return geom.base_position + geom.alpha * (p - geom.base_position)


def scale_up(geom: LinkageGeometry, p_proxy) -> np.ndarray:
    """Exact inverse of scale_down."""
    p = np.asarray(p_proxy, dtype=float)
    return geom.base_position + (p - geom.base_position) / geom.alpha


def map_velocity(geom: LinkageGeometry, v_interface) -> np.ndarray:
    """Interface velocity to constraint-node velocity."""
    return geom.alpha * np.asarray(v_interface, dtype=float)


def inverse_map_velocity(geom: LinkageGeometry, v_constraint) -> np.ndarray:
    return np.asarray(v_constraint, dtype=float) / geom.alpha


def map_force(geom: LinkageGeometry, f_interface) -> np.ndarray:
    """Interface force to constraint-node force (virtual-work dual of motion)."""
    return np.asarray(f_interface, dtype=float) / geom.alpha


def inverse_map_force(geom: LinkageGeometry, f_constraint) -> np.ndarray:
    return geom.alpha * np.asarray(f_constraint, dtype=float)


def jacobian(geom: LinkageGeometry, q: JointState) -> np.ndarray:
    """Analytic 3x3 Jacobian of the interface node w.r.t. (theta, a1, a2)."""
    check_joint_limits(geom, q)
    ct, st = math.cos(q.theta), math.sin(q.theta)
    c1, s1 = math.cos(q.a1), math.sin(q.a1)
    c12, s12 = math.cos(q.a1 + q.a2), math.sin(q.a1 + q.a2)
    er = geom.l1 * c1 + geom.l2 * c12
    der_da1 = -geom.l1 * s1 - geom.l2 * s12
    der_da2 = -geom.l2 * s12
    dev_da1 = geom.l1 * c1 + geom.l2 * c12
    dev_da2 = geom.l2 * c12
    return np.array(
        [
            [-er * st, der_da1 * ct, der_da2 * ct],
            [er * ct, der_da1 * st, der_da2 * st],
            [0.0, dev_da1, dev_da2],
        ]
    )


def constraint_jacobian(geom: LinkageGeometry, q: JointState) -> np.ndarray:
    """Jacobian of the constraint node: alpha times the interface Jacobian."""
    return geom.alpha * jacobian(geom, q)


def sample_joint_states(geom: LinkageGeometry, n: int, seed: int = 0) -> list[JointState]:
    """Random joint states within all limits (rejection on elevation)."""
    rng = np.random.default_rng(seed)
    out: list[JointState] = []
    while len(out) < n:
        theta = rng.uniform(-geom.azimuth_limit, geom.azimuth_limit)
        a2 = rng.uniform(geom.elbow_min, geom.elbow_max)
        a1 = rng.uniform(-math.pi / 2.0, math.pi / 2.0)
        q = JointState(theta=theta, a1=a1, a2=a2)
        try:
            check_joint_limits(geom, q)
        except JointLimitError:
            continue
        out.append(q)
    return out


def sample_reachable_points(geom: LinkageGeometry, n: int, seed: int = 0) -> np.ndarray:
    """(n, 3) world points uniform over the shell-sector volume."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, size=n)
    r = (geom.r_min**3 + u * (geom.r_max**3 - geom.r_min**3)) ** (1.0 / 3.0)
    az = rng.uniform(-geom.azimuth_limit, geom.azimuth_limit, size=n)
    s = rng.uniform(math.sin(geom.elevation_min), math.sin(geom.elevation_max), size=n)
    el = np.arcsin(s)
    ce = np.cos(el)
    pts = np.column_stack((r * ce * np.cos(az), r * ce * np.sin(az), r * np.sin(el)))
    return pts + geom.base_position


def workspace_report(geom: LinkageGeometry, samples: int, seed: int = 0) -> WorkspaceReport:
    """Analytic reach/solid-angle plus a Monte Carlo cross-check.

    Directions are drawn uniformly on the unit sphere; the hit fraction
    estimates solid_angle / (4*pi) with binomial standard error.
    """
    if samples < 1000:
        raise ValueError(f"samples must be >= 1000, got {samples}")
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1.0, 1.0, size=samples)
    phi = rng.uniform(-math.pi, math.pi, size=samples)
    rho = np.sqrt(1.0 - z * z)
    dirs = np.column_stack((rho * np.cos(phi), rho * np.sin(phi), z))
    hits = kernels.count_in_sector(
        np.ascontiguousarray(dirs), geom.azimuth_limit, geom.elevation_min, geom.elevation_max
    )
    p = hits / samples
    four_pi = 4.0 * math.pi
    mc = four_pi * p
    stderr = four_pi * math.sqrt(max(p * (1.0 - p), 0.0) / samples)
    return WorkspaceReport(
        r_min=geom.r_min,
        r_max=geom.r_max,
        solid_angle_analytic=geom.solid_angle,
        solid_angle_mc=mc,
        mc_samples=samples,
        mc_stderr=stderr,
    )


_GEOMETRY_KEYS = {
    "format_version",
    "alpha",
    "l1_m",
    "l2_m",
    "azimuth_limit_deg",
    "elevation_min_deg",
    "elevation_max_deg",
    "elbow_min_deg",
    "elbow_max_deg",
    "base_position_m",
}


def geometry_to_dict(geom: LinkageGeometry) -> dict:
    return {
        "format_version": 1,
        "alpha": geom.alpha,
        "l1_m": geom.l1,
        "l2_m": geom.l2,
        "azimuth_limit_deg": math.degrees(geom.azimuth_limit),
        "elevation_min_deg": math.degrees(geom.elevation_min),
        "elevation_max_deg": math.degrees(geom.elevation_max),
        "elbow_min_deg": math.degrees(geom.elbow_min),
        "elbow_max_deg": math.degrees(geom.elbow_max),
        "base_position_m": [float(v) for v in geom.base_position],
    }


def geometry_from_dict(data: dict) -> LinkageGeometry:
    if not isinstance(data, dict):
        raise FormatError("geometry file must hold a JSON object")
    unknown = set(data) - _GEOMETRY_KEYS
    if unknown:
        raise FormatError(f"unknown geometry key: {sorted(unknown)[0]!r}")
    missing = _GEOMETRY_KEYS - set(data)
    if missing:
        raise FormatError(f"missing geometry key: {sorted(missing)[0]!r}")
    if data["format_version"] != 1:
        raise FormatError(f"unsupported format_version {data['format_version']!r}")
    base = data["base_position_m"]
    if not (isinstance(base, list) and len(base) == 3):
        raise FormatError("base_position_m must be a 3-element array")
    return LinkageGeometry(
        alpha=float(data["alpha"]),
        l1=float(data["l1_m"]),
        l2=float(data["l2_m"]),
        azimuth_limit=math.radians(float(data["azimuth_limit_deg"])),
        elevation_min=math.radians(float(data["elevation_min_deg"])),
        elevation_max=math.radians(float(data["elevation_max_deg"])),
        elbow_min=math.radians(float(data["elbow_min_deg"])),
        elbow_max=math.radians(float(data["elbow_max_deg"])),
        base_position=np.array([float(v) for v in base]),
    )


def load_geometry(path) -> LinkageGeometry:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"geometry file is not valid JSON: {exc}") from exc
    return geometry_from_dict(data)


def save_geometry(geom: LinkageGeometry, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(geometry_to_dict(geom), fh, indent=2, sort_keys=True)
        fh.write("\n")
