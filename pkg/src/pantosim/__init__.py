"""pantosim: digital twin of a 3D-pantograph encountered-type haptic device."""

from .kernels import BACKEND, COMPILED
from .linkage import (
    JointState,
    LinkageGeometry,
    LinkagePose,
    WorkspaceReport,
    forward_kinematics,
    geometry_from_spec,
    inverse_kinematics,
    jacobian,
    map_force,
    map_velocity,
    scale_down,
    scale_up,
    workspace_report,
)
from .proxy import (
    ContactState,
    HeightField,
    HorizontalPlane,
    PlaneSet,
    TriMesh,
    contact_reaction,
    rendered_surface,
    resolve_constrained_motion,
    signed_distance,
)
from .actuator import ActuatorState, apply_axial_load, rendered_plane_speed, step_actuator
from .session import (
    HandSample,
    Scene,
    SessionResult,
    StepRecord,
    generate_raster_trajectory,
    make_scene,
    run,
    set_plane_setpoint,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "COMPILED",
    "ActuatorState",
    "ContactState",
    "HandSample",
    "HeightField",
    "HorizontalPlane",
    "JointState",
    "LinkageGeometry",
    "LinkagePose",
    "PlaneSet",
    "Scene",
    "SessionResult",
    "StepRecord",
    "TriMesh",
    "WorkspaceReport",
    "apply_axial_load",
    "contact_reaction",
    "forward_kinematics",
    "generate_raster_trajectory",
    "geometry_from_spec",
    "inverse_kinematics",
    "jacobian",
    "make_scene",
    "map_force",
    "map_velocity",
    "rendered_plane_speed",
    "rendered_surface",
    "resolve_constrained_motion",
    "run",
    "scale_down",
    "scale_up",
    "set_plane_setpoint",
    "signed_distance",
    "step",
    "step_actuator",
    "workspace_report",
]
