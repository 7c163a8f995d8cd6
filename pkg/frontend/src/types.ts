// Wire protocol types (proto 1) shared across the workbench.

export type Vec3 = [number, number, number];

export interface Envelope {
  type: string;
  session_id?: string | null;
  seq: number;
  payload?: Record<string, unknown>;
}

export interface ContactInfo {
  in_contact: boolean;
  active_normals: Vec3[];
  penetration_raw_m: number;
  dof_translational: number;
  dof_rotational: number;
  reaction_constraint_n: Vec3;
  reaction_interface_n: Vec3;
}

export interface ActuatorInfo {
  height_m: number;
  setpoint_m: number;
  command_speed_mps: number;
  axial_load_n: number;
}

export interface JointInfo {
  theta_rad: number;
  a1_rad: number;
  a2_rad: number;
  handle_pitch_rad: number;
  handle_yaw_rad: number;
}

export interface BarPoints {
  O: Vec3;
  A: Vec3;
  E: Vec3;
  B: Vec3;
  D: Vec3;
  L: Vec3;
}

export interface StepRecord {
  t_s: number;
  raw_target_m: Vec3;
  resolved_interface_m: Vec3;
  joint_state: JointInfo;
  constraint_node_m: Vec3;
  contact: ContactInfo;
  actuator: ActuatorInfo;
  tiles_remaining: number;
  hand_weight_force_n: number;
  bar_points_m?: BarPoints;
}

export interface TelemetryMessage extends Envelope {
  type: "telemetry";
  session_id: string;
  payload: StepRecord & Record<string, unknown>;
}

export interface GeometryParams {
  alpha: number;
  l1_m: number;
  l2_m: number;
  azimuth_limit_deg: number;
  elevation_min_deg: number;
  elevation_max_deg: number;
  elbow_min_deg: number;
  elbow_max_deg: number;
  base_position_m: Vec3;
  format_version: number;
}

// Minimal socket surface so tests can inject fakes for WebSocket.
export interface SocketLike {
  send(data: string): void;
  close(): void;
  set onmessage(handler: ((ev: { data: string }) => void) | null);
  set onopen(handler: (() => void) | null);
  set onclose(handler: (() => void) | null);
}
