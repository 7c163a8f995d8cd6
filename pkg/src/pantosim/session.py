"""Discrete-time interaction sessions: the table-wiping scenario.

A session consumes hand-target samples, clamps them into the workspace,
resolves contact against the proxy plane in constraint space, scales the
result back up, erases dirt tiles under the contact footprint, and steps the
actuator toward its operator setpoint.  Contact is never an input to the
actuator, so the device stays encountered-type passive.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from . import kernels
from .actuator import ActuatorState, set_setpoint, step_actuator
from .errors import FormatError, TrajectoryError
from .linkage import (
    JointState,
    LinkageGeometry,
    clamp_to_workspace,
    forward_kinematics,
    inverse_kinematics,
    scale_down,
    scale_up,
)
from .proxy import (
    ContactState,
    HorizontalPlane,
    _project,
    contact_reaction,
    resolve_constrained_motion,
    signed_distance,
)

DEFAULT_DT = 0.005
FOOTPRINT_RADIUS = 0.01
PRESS_DEPTH = 0.005
# weight of the linkage felt at the hand: 0.91 kg at g = 9.81
HAND_WEIGHT_N = 8.93
DEFAULT_TABLE_SIZE_X = 0.6
DEFAULT_TABLE_SIZE_Y = 0.3
DEFAULT_TILE_ROWS = 10
DEFAULT_TILE_COLS = 10


@dataclasses.dataclass(frozen=True)
class Table:
    center: np.ndarray
    size_x: float = DEFAULT_TABLE_SIZE_X
    size_y: float = DEFAULT_TABLE_SIZE_Y

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.center.shape != (3,):
            raise ValueError("table center must be a 3-vector")
        if self.size_x <= 0.0 or self.size_y <= 0.0:
            raise ValueError("table size must be positive")

    @property
    def height(self) -> float:
        return float(self.center[2])


@dataclasses.dataclass(frozen=True)
class TileGrid:
    rows: int
    cols: int
    erased: np.ndarray

    def __post_init__(self):
        erased = np.asarray(self.erased, dtype=bool)
        object.__setattr__(self, "erased", erased)
        if self.rows < 1 or self.cols < 1:
            raise ValueError("tile grid must have at least one row and column")
        if erased.shape != (self.rows, self.cols):
            raise ValueError("erased grid shape must be (rows, cols)")

    @property
    def total(self) -> int:
        return self.rows * self.cols

    @property
    def remaining(self) -> int:
        return int(self.total - np.count_nonzero(self.erased))


def tile_centers(table: Table, tiles: TileGrid) -> tuple[np.ndarray, np.ndarray]:
    """Flat arrays of tile-centre x and y (row-major over the grid)."""
    cx = table.center[0] - table.size_x / 2.0
    cy = table.center[1] - table.size_y / 2.0
    xs = cx + (np.arange(tiles.cols) + 0.5) * (table.size_x / tiles.cols)
    ys = cy + (np.arange(tiles.rows) + 0.5) * (table.size_y / tiles.rows)
    gx, gy = np.meshgrid(xs, ys)
    return gx.ravel(), gy.ravel()


@dataclasses.dataclass(frozen=True)
class Scene:
    table: Table
    tiles: TileGrid
    proxy: HorizontalPlane
    actuator: ActuatorState


@dataclasses.dataclass(frozen=True)
class HandSample:
    t: float
    target: np.ndarray
    handle_pitch: float = 0.0
    handle_yaw: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "target", np.asarray(self.target, dtype=float))


@dataclasses.dataclass(frozen=True)
class StepRecord:
    t: float
    raw_target: np.ndarray
    resolved_interface: np.ndarray
    joint_state: JointState
    constraint_node: np.ndarray
    contact: ContactState
    actuator: ActuatorState
    tiles_remaining: int
    hand_weight_force: float = HAND_WEIGHT_N


@dataclasses.dataclass(frozen=True)
class SessionMetrics:
    tiles_total: int
    tiles_erased: int
    completion: float
    max_penetration: float
    contact_events: int
    elapsed: float
    steps: int


@dataclasses.dataclass(frozen=True)
class SessionResult:
    records: list
    metrics: SessionMetrics


def make_scene(
    geom: LinkageGeometry,
    table_center,
    rows: int = DEFAULT_TILE_ROWS,
    cols: int = DEFAULT_TILE_COLS,
    size_x: float = DEFAULT_TABLE_SIZE_X,
    size_y: float = DEFAULT_TABLE_SIZE_Y,
    kp: float = 2.0,
    v_up: float = 0.016,
    v_down: float = 0.020,
    initial_height: float | None = None,
) -> Scene:
    """Scene with the proxy plane derived from the table plane by scale-down."""
    table = Table(center=table_center, size_x=size_x, size_y=size_y)
    derived = float(scale_down(geom, table.center)[2])
    h0 = derived if initial_height is None else float(initial_height)
    act = ActuatorState(
        height=h0, setpoint=h0, kp=kp, v_up_max=v_up, v_down_max=v_down
    )
    tiles = TileGrid(rows=rows, cols=cols, erased=np.zeros((rows, cols), dtype=bool))
    return Scene(table=table, tiles=tiles, proxy=HorizontalPlane(h0), actuator=act)


def set_plane_setpoint(scene: Scene, geom: LinkageGeometry, world_height: float) -> Scene:
    """Command the proxy plane toward the scale-down of a rendered height."""
    z_lo = geom.base_position[2] + geom.r_max * math.sin(geom.elevation_min)
    z_hi = geom.base_position[2] + geom.r_max * math.sin(geom.elevation_max)
    if not z_lo <= world_height <= z_hi:
        raise ValueError(
            f"rendered plane {world_height} m outside workspace vertical span "
            f"[{z_lo:.4f}, {z_hi:.4f}]"
        )
    b = geom.base_position
    setpoint = float(scale_down(geom, [b[0], b[1], world_height])[2])
    return dataclasses.replace(scene, actuator=set_setpoint(scene.actuator, setpoint))


def step(
    scene: Scene,
    geom: LinkageGeometry,
    sample: HandSample,
    dt: float,
    prev_constraint: np.ndarray | None = None,
) -> tuple[Scene, StepRecord]:
    """One simulation step; returns the updated scene and its telemetry record."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    raw = np.asarray(sample.target, dtype=float)
    clamped = clamp_to_workspace(geom, raw)
    desired_c = scale_down(geom, clamped)
    surface = scene.proxy
    # god-object continuity: re-seat the previous point on the (possibly
    # moved) surface so a rising platform lifts the hand instead of faulting
    if prev_constraint is None:
        current_c, _ = _project(surface, desired_c)
    else:
        current_c, _ = _project(surface, np.asarray(prev_constraint, dtype=float))
    resolved_c, contact = resolve_constrained_motion(surface, current_c, desired_c)
    # off contact the hand is untouched: return the clamped target verbatim
    # rather than a scale-down/up roundtrip that would wobble the last ulp
    if contact.in_contact:
        resolved_i = scale_up(geom, resolved_c)
    else:
        resolved_i = clamped
    if contact.in_contact:
        contact = contact_reaction(
            surface, contact, np.array([0.0, 0.0, -HAND_WEIGHT_N]), geom
        )
    tiles = scene.tiles
    if contact.in_contact:
        cx, cy = tile_centers(scene.table, tiles)
        erased = np.ascontiguousarray(tiles.erased.ravel().astype(np.uint8))
        newly = kernels.erase_tiles(
            np.ascontiguousarray(cx),
            np.ascontiguousarray(cy),
            erased,
            resolved_i[0],
            resolved_i[1],
            FOOTPRINT_RADIUS,
        )
        if newly:
            tiles = dataclasses.replace(
                tiles, erased=erased.astype(bool).reshape(tiles.rows, tiles.cols)
            )
    actuator = step_actuator(scene.actuator, dt)
    joint = inverse_kinematics(geom, clamp_to_workspace(geom, resolved_i))
    joint = dataclasses.replace(
        joint, handle_pitch=sample.handle_pitch, handle_yaw=sample.handle_yaw
    )
    record = StepRecord(
        t=sample.t,
        raw_target=raw,
        resolved_interface=resolved_i,
        joint_state=joint,
        constraint_node=resolved_c,
        contact=contact,
        actuator=actuator,
        tiles_remaining=tiles.remaining,
    )
    scene = dataclasses.replace(
        scene, tiles=tiles, actuator=actuator, proxy=HorizontalPlane(actuator.height)
    )
    return scene, record


def _resample(traj: list[HandSample], dt: float) -> list[HandSample]:
    """Linear resample of the trajectory onto the fixed step grid."""
    ts = np.array([s.t for s in traj])
    if len(traj) < 1:
        raise TrajectoryError("trajectory is empty")
    if np.any(np.diff(ts) <= 0.0):
        raise TrajectoryError("trajectory timestamps must be strictly increasing")
    targets = np.vstack([s.target for s in traj])
    pitch = np.array([s.handle_pitch for s in traj])
    yaw = np.array([s.handle_yaw for s in traj])
    t0 = ts[0]
    t1 = ts[-1]
    n = int(math.floor((t1 - t0) / dt + 1e-9)) + 1
    grid = t0 + dt * np.arange(n)
    xs = np.interp(grid, ts, targets[:, 0])
    ys = np.interp(grid, ts, targets[:, 1])
    zs = np.interp(grid, ts, targets[:, 2])
    ps = np.interp(grid, ts, pitch)
    ws = np.interp(grid, ts, yaw)
    return [
        HandSample(
            t=float(grid[k]),
            target=np.array([xs[k], ys[k], zs[k]]),
            handle_pitch=float(ps[k]),
            handle_yaw=float(ws[k]),
        )
        for k in range(n)
    ]


def run(
    scene: Scene,
    geom: LinkageGeometry,
    traj: list[HandSample],
    dt: float = DEFAULT_DT,
) -> SessionResult:
    """Run a full session deterministically; same inputs, same bytes out."""
    if not traj:
        raise TrajectoryError("trajectory is empty")
    samples = _resample(traj, dt)
    records = []
    prev_c = None
    max_pen = 0.0
    events = 0
    was_contact = False
    for sample in samples:
        scene_before = scene
        scene, record = step(scene, geom, sample, dt, prev_constraint=prev_c)
        prev_c = record.constraint_node
        d, _ = signed_distance(scene_before.proxy, record.constraint_node)
        if -d > max_pen:
            max_pen = -d
        if record.contact.in_contact and not was_contact:
            events += 1
        was_contact = record.contact.in_contact
        records.append(record)
    metrics = SessionMetrics(
        tiles_total=scene.tiles.total,
        tiles_erased=scene.tiles.total - scene.tiles.remaining,
        completion=(scene.tiles.total - scene.tiles.remaining) / scene.tiles.total,
        max_penetration=max(0.0, max_pen),
        contact_events=events,
        elapsed=samples[-1].t - samples[0].t,
        steps=len(samples),
    )
    return SessionResult(records=records, metrics=metrics)


def generate_raster_trajectory(
    scene: Scene,
    lane_overlap: float = 0.0,
    speed: float = 0.25,
    sample_rate: float = 200.0,
    press_depth: float = PRESS_DEPTH,
) -> list[HandSample]:
    """Boustrophedon sweep over the table whose footprint covers every tile.

    Lanes start on the first tile-row centre with pitch (row pitch) *
    (1 - lane_overlap); a negative press_depth flies above the surface
    without contact.  Raises when the lane set cannot cover the tile rows.
    """
    if speed <= 0.0:
        raise ValueError(f"speed must be positive, got {speed}")
    if sample_rate <= 0.0:
        raise ValueError(f"sample_rate must be positive, got {sample_rate}")
    table = scene.table
    tiles = scene.tiles
    row_pitch = table.size_y / tiles.rows
    pitch = row_pitch * (1.0 - lane_overlap)
    if pitch <= 0.0:
        raise ValueError("zero lanes: lane_overlap >= 1 leaves no lane pitch")
    y_first = table.center[1] - table.size_y / 2.0 + row_pitch / 2.0
    y_last = table.center[1] + table.size_y / 2.0 - row_pitch / 2.0
    n_lanes = int(math.floor((y_last - y_first) / pitch + 1e-9)) + 1
    if n_lanes < 1:
        raise ValueError("zero lanes: table narrower than one lane")
    lane_ys = [y_first + i * pitch for i in range(n_lanes)]
    row_ys = [y_first + j * row_pitch for j in range(tiles.rows)]
    for ry in row_ys:
        if min(abs(ry - ly) for ly in lane_ys) > FOOTPRINT_RADIUS:
            raise ValueError(
                f"lanes do not cover tile rows: row centre y={ry:.4f} is farther "
                f"than the {FOOTPRINT_RADIUS} m footprint from every lane"
            )
    x_lo = table.center[0] - table.size_x / 2.0
    x_hi = table.center[0] + table.size_x / 2.0
    z = table.height - press_depth
    waypoints = []
    for i, ly in enumerate(lane_ys):
        xs = (x_lo, x_hi) if i % 2 == 0 else (x_hi, x_lo)
        waypoints.append(np.array([xs[0], ly, z]))
        waypoints.append(np.array([xs[1], ly, z]))
    # constant-speed parametrisation over the polyline
    seg_len = [
        float(np.linalg.norm(waypoints[i + 1] - waypoints[i]))
        for i in range(len(waypoints) - 1)
    ]
    total = sum(seg_len)
    duration = total / speed
    n = int(math.floor(duration * sample_rate)) + 1
    cum = np.concatenate(([0.0], np.cumsum(seg_len)))
    samples = []
    for k in range(n):
        t = k / sample_rate
        dist = min(t * speed, total)
        i = int(np.searchsorted(cum, dist, side="right")) - 1
        i = min(i, len(seg_len) - 1)
        frac = 0.0 if seg_len[i] == 0.0 else (dist - cum[i]) / seg_len[i]
        p = waypoints[i] + frac * (waypoints[i + 1] - waypoints[i])
        samples.append(HandSample(t=t, target=p))
    return samples


# ---------------------------------------------------------------------------
# serialization

_SCENE_KEYS = {"format_version", "table", "tiles", "actuator"}
_TABLE_KEYS = {"center_m", "size_x_m", "size_y_m", "height_m"}
_TILES_KEYS = {"rows", "cols"}
_ACT_KEYS = {"kp_per_s", "v_up_mps", "v_down_mps", "initial_height_m"}


def scene_from_dict(data: dict, geom: LinkageGeometry) -> Scene:
    if not isinstance(data, dict):
        raise FormatError("scene file must hold a JSON object")
    unknown = set(data) - _SCENE_KEYS
    if unknown:
        raise FormatError(f"unknown scene key: {sorted(unknown)[0]!r}")
    missing = _SCENE_KEYS - set(data)
    if missing:
        raise FormatError(f"missing scene key: {sorted(missing)[0]!r}")
    if data["format_version"] != 1:
        raise FormatError(f"unsupported format_version {data['format_version']!r}")
    table = data["table"]
    unknown = set(table) - _TABLE_KEYS
    if unknown:
        raise FormatError(f"unknown table key: {sorted(unknown)[0]!r}")
    center = table.get("center_m")
    if not (isinstance(center, list) and len(center) == 3):
        raise FormatError("table center_m must be a 3-element array")
    if abs(float(table.get("height_m", center[2])) - float(center[2])) > 1e-12:
        raise FormatError("table height_m must equal center_m[2]")
    tiles = data["tiles"]
    unknown = set(tiles) - _TILES_KEYS
    if unknown:
        raise FormatError(f"unknown tiles key: {sorted(unknown)[0]!r}")
    act = data["actuator"]
    unknown = set(act) - _ACT_KEYS
    if unknown:
        raise FormatError(f"unknown actuator key: {sorted(unknown)[0]!r}")
    try:
        return make_scene(
            geom,
            table_center=[float(v) for v in center],
            rows=int(tiles["rows"]),
            cols=int(tiles["cols"]),
            size_x=float(table["size_x_m"]),
            size_y=float(table["size_y_m"]),
            kp=float(act["kp_per_s"]),
            v_up=float(act["v_up_mps"]),
            v_down=float(act["v_down_mps"]),
            initial_height=(
                float(act["initial_height_m"]) if "initial_height_m" in act else None
            ),
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatError(f"bad scene payload: {exc}") from exc


def scene_to_dict(scene: Scene) -> dict:
    return {
        "format_version": 1,
        "table": {
            "center_m": [float(v) for v in scene.table.center],
            "size_x_m": scene.table.size_x,
            "size_y_m": scene.table.size_y,
            "height_m": scene.table.height,
        },
        "tiles": {"rows": scene.tiles.rows, "cols": scene.tiles.cols},
        "actuator": {
            "kp_per_s": scene.actuator.kp,
            "v_up_mps": scene.actuator.v_up_max,
            "v_down_mps": scene.actuator.v_down_max,
            "initial_height_m": scene.actuator.height,
        },
    }


def load_scene(path, geom: LinkageGeometry) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"scene file is not valid JSON: {exc}") from exc
    return scene_from_dict(data, geom)


def save_scene(scene: Scene, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scene_to_dict(scene), fh, indent=2, sort_keys=True)
        fh.write("\n")


TRAJECTORY_HEADER = "t_s,x_m,y_m,z_m,pitch_rad,yaw_rad"


def save_trajectory(traj: list[HandSample], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for s in traj:
            fields = (
                s.t,
                float(s.target[0]),
                float(s.target[1]),
                float(s.target[2]),
                s.handle_pitch,
                s.handle_yaw,
            )
            fh.write(",".join(repr(v) for v in fields) + "\n")


def load_trajectory(path) -> list[HandSample]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        cols = header.split(",")
        if cols not in (
            ["t_s", "x_m", "y_m", "z_m"],
            ["t_s", "x_m", "y_m", "z_m", "pitch_rad", "yaw_rad"],
        ):
            raise FormatError(f"bad trajectory header {header!r}")
        out = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(cols):
                raise FormatError(f"trajectory line {lineno}: expected {len(cols)} fields")
            try:
                vals = [float(v) for v in parts]
            except ValueError as exc:
                raise FormatError(f"trajectory line {lineno}: {exc}") from exc
            pitch = vals[4] if len(vals) > 4 else 0.0
            yaw = vals[5] if len(vals) > 5 else 0.0
            out.append(
                HandSample(t=vals[0], target=np.array(vals[1:4]), handle_pitch=pitch, handle_yaw=yaw)
            )
    if not out:
        raise TrajectoryError("trajectory is empty")
    ts = np.array([s.t for s in out])
    if np.any(np.diff(ts) <= 0.0):
        raise TrajectoryError("trajectory timestamps must be strictly increasing")
    return out


def contact_to_dict(c: ContactState) -> dict:
    return {
        "in_contact": c.in_contact,
        "active_normals": [[float(v) for v in n] for n in c.active_constraints],
        "penetration_raw_m": c.penetration_raw,
        "dof_translational": c.dof_translational,
        "dof_rotational": c.dof_rotational,
        "reaction_constraint_n": [float(v) for v in c.reaction_constraint],
        "reaction_interface_n": [float(v) for v in c.reaction_interface],
    }


def record_to_dict(r: StepRecord, geom: LinkageGeometry | None = None) -> dict:
    out = {
        "t_s": r.t,
        "raw_target_m": [float(v) for v in r.raw_target],
        "resolved_interface_m": [float(v) for v in r.resolved_interface],
        "joint_state": {
            "theta_rad": r.joint_state.theta,
            "a1_rad": r.joint_state.a1,
            "a2_rad": r.joint_state.a2,
            "handle_pitch_rad": r.joint_state.handle_pitch,
            "handle_yaw_rad": r.joint_state.handle_yaw,
        },
        "constraint_node_m": [float(v) for v in r.constraint_node],
        "contact": contact_to_dict(r.contact),
        "actuator": {
            "height_m": r.actuator.height,
            "setpoint_m": r.actuator.setpoint,
            "command_speed_mps": r.actuator.command_speed,
            "axial_load_n": r.actuator.axial_load,
        },
        "tiles_remaining": r.tiles_remaining,
        "hand_weight_force_n": r.hand_weight_force,
    }
    if geom is not None:
        # bar points let a display client draw the linkage without doing
        # kinematics of its own
        pose = forward_kinematics(geom, r.joint_state)
        out["bar_points_m"] = {
            name: [float(v) for v in pt] for name, pt in pose.bar_points.items()
        }
    return out


def result_to_dict(
    result: SessionResult,
    geom: LinkageGeometry | None = None,
    include_records: bool = True,
) -> dict:
    m = result.metrics
    out = {
        "format_version": 1,
        "metrics": {
            "tiles_total": m.tiles_total,
            "tiles_erased": m.tiles_erased,
            "completion": m.completion,
            "max_penetration_m": m.max_penetration,
            "contact_events": m.contact_events,
            "elapsed_s": m.elapsed,
            "steps": m.steps,
        },
    }
    if include_records:
        out["records"] = [record_to_dict(r, geom) for r in result.records]
    return out


def save_result(result: SessionResult, path, geom=None, include_records=True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(
            result_to_dict(result, geom, include_records), fh, indent=2, sort_keys=True
        )
        fh.write("\n")
