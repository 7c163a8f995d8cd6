// Orthographic orbit camera: world <-> screen mapping and drag unprojection.

import type { Vec3 } from "./types.js";

export interface Screen {
  width: number;
  height: number;
}

export class OrbitCamera {
  /** yaw about world z, radians */
  yaw: number;
  /** pitch above the horizontal, radians */
  pitch: number;
  /** world metres per screen-height */
  span: number;
  target: Vec3;

  constructor(yaw = -0.9, pitch = 0.35, span = 2.2, target: Vec3 = [0, 0, 1]) {
    this.yaw = yaw;
    this.pitch = pitch;
    this.span = span;
    this.target = target;
  }

  /** camera basis: right, up, forward (unit, world frame) */
  basis(): { right: Vec3; up: Vec3; forward: Vec3 } {
    const cy = Math.cos(this.yaw);
    const sy = Math.sin(this.yaw);
    const cp = Math.cos(this.pitch);
    const sp = Math.sin(this.pitch);
    const forward: Vec3 = [-cy * cp, -sy * cp, -sp];
    const right: Vec3 = [-sy, cy, 0];
    const up: Vec3 = [
      right[1] * forward[2] - right[2] * forward[1],
      right[2] * forward[0] - right[0] * forward[2],
      right[0] * forward[1] - right[1] * forward[0],
    ];
    return { right, up, forward };
  }

  project(p: Vec3, screen: Screen): { x: number; y: number; depth: number } {
    const { right, up, forward } = this.basis();
    const d: Vec3 = [
      p[0] - this.target[0],
      p[1] - this.target[1],
      p[2] - this.target[2],
    ];
    const scale = screen.height / this.span;
    const x = screen.width / 2 + scale * (d[0] * right[0] + d[1] * right[1] + d[2] * right[2]);
    const y = screen.height / 2 - scale * (d[0] * up[0] + d[1] * up[1] + d[2] * up[2]);
    const depth = d[0] * forward[0] + d[1] * forward[1] + d[2] * forward[2];
    return { x, y, depth };
  }

  /** screen-pixel delta to a world delta in the camera plane */
  unprojectDelta(dxPx: number, dyPx: number, screen: Screen): Vec3 {
    const { right, up } = this.basis();
    const scale = this.span / screen.height;
    const wx = dxPx * scale;
    const wy = -dyPx * scale;
    return [
      wx * right[0] + wy * up[0],
      wx * right[1] + wy * up[1],
      wx * right[2] + wy * up[2],
    ];
  }
}
