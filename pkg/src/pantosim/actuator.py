"""Self-locking lead-screw actuator under proportional speed control.

The controller output is a linear speed, clamped to the asymmetric limits
(1.6 cm/s up, 2.0 cm/s down).  The screw is mechanically self-locking: axial
load is recorded but can never move the platform; only commands do.
"""

from __future__ import annotations

import dataclasses

from . import kernels
from .linkage import LinkageGeometry

V_UP_MAX = 0.016
V_DOWN_MAX = 0.020
DEFAULT_KP = 2.0
SUB_DT = 0.001


@dataclasses.dataclass(frozen=True)
class ActuatorState:
    height: float
    setpoint: float
    command_speed: float = 0.0
    kp: float = DEFAULT_KP
    v_up_max: float = V_UP_MAX
    v_down_max: float = V_DOWN_MAX
    axial_load: float = 0.0

    def __post_init__(self):
        if self.kp <= 0.0:
            raise ValueError(f"kp must be positive, got {self.kp}")
        if self.v_up_max <= 0.0 or self.v_down_max <= 0.0:
            raise ValueError("speed limits must be positive")
        if not -self.v_down_max <= self.command_speed <= self.v_up_max:
            raise ValueError(
                f"command_speed {self.command_speed} outside "
                f"[-{self.v_down_max}, {self.v_up_max}]"
            )


def step_actuator(st: ActuatorState, dt: float) -> ActuatorState:
    """One control step of dt seconds, internally sub-stepped to <= 1 ms.

    Speed-limited proportional drive toward the setpoint with exact-arrival
    snapping (never overshoots).  The axial load does not appear in the
    update at all: the same trajectory results loaded or unloaded.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    height, first_cmd = kernels.actuator_advance(
        st.height, st.setpoint, st.kp, st.v_up_max, st.v_down_max, dt, SUB_DT
    )
    return dataclasses.replace(st, height=height, command_speed=first_cmd)


def apply_axial_load(st: ActuatorState, force: float) -> ActuatorState:
    """Record an axial load; the self-locking screw holds height regardless."""
    return dataclasses.replace(st, axial_load=float(force))


def set_setpoint(st: ActuatorState, setpoint: float) -> ActuatorState:
    return dataclasses.replace(st, setpoint=float(setpoint))


def rendered_plane_speed(st: ActuatorState, geom: LinkageGeometry) -> float:
    """Speed of the rendered plane: commanded proxy speed scaled by 1/alpha."""
    return st.command_speed / geom.alpha
