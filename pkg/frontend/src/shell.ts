// Display-only geometry: workspace shell outlines and alpha-scaling helpers.
//
// These draw static context (the reachable sector, the rendered table) from
// the geometry parameters; the moving pose itself always comes from server
// telemetry.

import type { GeometryParams, Vec3 } from "./types.js";

const DEG = Math.PI / 180;

function sph(base: Vec3, r: number, az: number, el: number): Vec3 {
  const ce = Math.cos(el);
  return [
    base[0] + r * ce * Math.cos(az),
    base[1] + r * ce * Math.sin(az),
    base[2] + r * Math.sin(el),
  ];
}

export interface ShellOutline {
  /** polylines in world metres */
  lines: Vec3[][];
}

export function shellOutline(g: GeometryParams, segments = 48): ShellOutline {
  const azLim = g.azimuth_limit_deg * DEG;
  const elMin = g.elevation_min_deg * DEG;
  const elMax = g.elevation_max_deg * DEG;
  const base = g.base_position_m;
  const lines: Vec3[][] = [];
  const radii = [reachMin(g), reachMax(g)];
  const els = [elMin, 0, elMax];
  for (const r of radii) {
    for (const el of els) {
      const arc: Vec3[] = [];
      for (let i = 0; i <= segments; i++) {
        const az = -azLim + (2 * azLim * i) / segments;
        arc.push(sph(base, r, az, el));
      }
      lines.push(arc);
    }
    for (const az of [-azLim, azLim]) {
      const arc: Vec3[] = [];
      for (let i = 0; i <= segments; i++) {
        const el = elMin + ((elMax - elMin) * i) / segments;
        arc.push(sph(base, r, az, el));
      }
      lines.push(arc);
    }
  }
  for (const az of [-azLim, 0, azLim]) {
    for (const el of [elMin, elMax]) {
      lines.push([sph(base, radii[0], az, el), sph(base, radii[1], az, el)]);
    }
  }
  return { lines };
}

export function reachMax(g: GeometryParams): number {
  return reach(g, g.elbow_min_deg * DEG);
}

export function reachMin(g: GeometryParams): number {
  return reach(g, g.elbow_max_deg * DEG);
}

function reach(g: GeometryParams, elbow: number): number {
  return Math.sqrt(
    g.l1_m * g.l1_m + g.l2_m * g.l2_m + 2 * g.l1_m * g.l2_m * Math.cos(elbow)
  );
}

/** interface-space point scaled down to constraint space about the base */
export function scaleDown(g: GeometryParams, p: Vec3): Vec3 {
  const b = g.base_position_m;
  return [
    b[0] + g.alpha * (p[0] - b[0]),
    b[1] + g.alpha * (p[1] - b[1]),
    b[2] + g.alpha * (p[2] - b[2]),
  ];
}

/** constraint-space point scaled up to interface space about the base */
export function scaleUp(g: GeometryParams, p: Vec3): Vec3 {
  const b = g.base_position_m;
  return [
    b[0] + (p[0] - b[0]) / g.alpha,
    b[1] + (p[1] - b[1]) / g.alpha,
    b[2] + (p[2] - b[2]) / g.alpha,
  ];
}

/** force at the constraint node for a given interface force magnitude */
export function forceGain(g: GeometryParams): number {
  return 1 / g.alpha;
}
