"""Small-scale proxy surfaces and constrained-motion resolution.

Surfaces are signed-distance queried (positive in free space) and motion is
resolved god-object style: the raw target projects to the nearest feasible
point, purely geometrically — contact never produces actuation commands.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from . import kernels
from .errors import FormatError, InfeasiblePointError, SurfaceDomainError
from .linkage import LinkageGeometry, scale_up

TOUCH_TOL = 1e-9


@dataclasses.dataclass(frozen=True)
class HorizontalPlane:
    """Infinite horizontal plane; free space above ``height``."""

    height: float


@dataclasses.dataclass(frozen=True)
class PlaneSet:
    """Intersection of half-spaces normal.x >= offset (free space inside)."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        normals = np.ascontiguousarray(self.normals, dtype=float)
        offsets = np.ascontiguousarray(self.offsets, dtype=float)
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)
        if normals.ndim != 2 or normals.shape[1] != 3 or normals.shape[0] == 0:
            raise ValueError("normals must be a non-empty (m, 3) array")
        if offsets.shape != (normals.shape[0],):
            raise ValueError("offsets must match the number of normals")
        lens = np.linalg.norm(normals, axis=1)
        bad = np.abs(lens - 1.0) > 1e-12
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ValueError(f"plane normal {i} is not unit length (|n| = {lens[i]!r})")


@dataclasses.dataclass(frozen=True)
class HeightField:
    """Rectangular grid of surface heights; rows along y, row-major."""

    origin: np.ndarray
    cell: float
    heights: np.ndarray

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float)
        heights = np.ascontiguousarray(self.heights, dtype=float)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "heights", heights)
        if origin.shape != (2,):
            raise ValueError("origin must be an (x, y) pair")
        if self.cell <= 0.0:
            raise ValueError("cell size must be positive")
        if heights.ndim != 2 or heights.shape[0] < 2 or heights.shape[1] < 2:
            raise ValueError("heights must be a rectangular grid, at least 2x2")


@dataclasses.dataclass(frozen=True)
class TriMesh:
    """Triangle soup; free space on the side the face normals point to."""

    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        vertices = np.ascontiguousarray(self.vertices, dtype=float)
        triangles = np.ascontiguousarray(self.triangles, dtype=np.int64)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "triangles", triangles)
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise ValueError("vertices must be (v, 3)")
        if triangles.ndim != 2 or triangles.shape[1] != 3 or triangles.shape[0] == 0:
            raise ValueError("triangles must be a non-empty (t, 3) index array")
        a = vertices[triangles[:, 0]]
        b = vertices[triangles[:, 1]]
        c = vertices[triangles[:, 2]]
        areas = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)
        if np.any(areas <= 1e-15):
            raise ValueError(f"triangle {int(np.argmin(areas))} is degenerate")


ProxySurface = HorizontalPlane | PlaneSet | HeightField | TriMesh


@dataclasses.dataclass(frozen=True)
class ContactState:
    """Contact summary at the constraint node for one resolved motion."""

    in_contact: bool
    active_constraints: tuple
    penetration_raw: float
    dof_translational: int
    dof_rotational: int
    reaction_constraint: np.ndarray
    reaction_interface: np.ndarray


_UP = np.array([0.0, 0.0, 1.0])


def _closest_points_on_triangles(tri_a, tri_b, tri_c, p):
    """Closest point to ``p`` on each triangle (vectorised Ericson test)."""
    ab = tri_b - tri_a
    ac = tri_c - tri_a
    ap = p - tri_a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = p - tri_b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = p - tri_c
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)
    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4
    denom = va + vb + vc
    with np.errstate(divide="ignore", invalid="ignore"):
        v_ab = np.where(d1 != d3, d1 / (d1 - d3), 0.0)
        w_ac = np.where(d2 != d6, d2 / (d2 - d6), 0.0)
        w_bc = np.where(
            (d4 - d3) + (d5 - d6) != 0.0, (d4 - d3) / ((d4 - d3) + (d5 - d6)), 0.0
        )
        v_in = np.where(denom != 0.0, vb / denom, 0.0)
        w_in = np.where(denom != 0.0, vc / denom, 0.0)
    out = tri_a + v_in[:, None] * ab + w_in[:, None] * ac
    on_bc = (va <= 0.0) & (d4 - d3 >= 0.0) & (d5 - d6 >= 0.0)
    out = np.where(
        on_bc[:, None], tri_b + w_bc[:, None] * (tri_c - tri_b), out
    )
    on_ac = (vb <= 0.0) & (d2 >= 0.0) & (d6 <= 0.0)
    out = np.where(on_ac[:, None], tri_a + w_ac[:, None] * ac, out)
    on_ab = (vc <= 0.0) & (d1 >= 0.0) & (d3 <= 0.0)
    out = np.where(on_ab[:, None], tri_a + v_ab[:, None] * ab, out)
    at_c = (d6 >= 0.0) & (d5 <= d6)
    out = np.where(at_c[:, None], tri_c, out)
    at_b = (d3 >= 0.0) & (d4 <= d3)
    out = np.where(at_b[:, None], tri_b, out)
    at_a = (d1 <= 0.0) & (d2 <= 0.0)
    out = np.where(at_a[:, None], tri_a, out)
    return out


def _mesh_nearest(s: TriMesh, p: np.ndarray):
    """(closest point, signed distance, outward normal) for a mesh query."""
    tri_a = s.vertices[s.triangles[:, 0]]
    tri_b = s.vertices[s.triangles[:, 1]]
    tri_c = s.vertices[s.triangles[:, 2]]
    candidates = _closest_points_on_triangles(tri_a, tri_b, tri_c, p)
    d2 = np.einsum("ij,ij->i", candidates - p, candidates - p)
    i = int(np.argmin(d2))
    q = candidates[i]
    face_n = np.cross(tri_b[i] - tri_a[i], tri_c[i] - tri_a[i])
    face_n = face_n / np.linalg.norm(face_n)
    u = p - q
    dist = math.sqrt(float(d2[i]))
    if dist > 1e-12:
        sign = 1.0 if float(np.dot(u, face_n)) >= 0.0 else -1.0
        return q, sign * dist, sign * u / dist
    return q, 0.0, face_n


def signed_distance(s: ProxySurface, p) -> tuple[float, np.ndarray]:
    """(distance, outward normal); positive outside, negative inside.

    PlaneSet reports the most-violated constraint; HeightField uses the
    vertical bilinear approximation; TriMesh the nearest feature.
    """
    p = np.asarray(p, dtype=float)
    if isinstance(s, HorizontalPlane):
        return float(p[2] - s.height), _UP.copy()
    if isinstance(s, PlaneSet):
        res = s.normals @ p - s.offsets
        i = int(np.argmin(res))
        return float(res[i]), s.normals[i].copy()
    if isinstance(s, HeightField):
        status, h, gx, gy = kernels.heightfield_query(
            s.origin[0], s.origin[1], s.cell, s.heights, p[0], p[1]
        )
        if status != 0:
            raise SurfaceDomainError(
                f"query ({p[0]:.6g}, {p[1]:.6g}) outside heightfield footprint"
            )
        n = np.array([-gx, -gy, 1.0])
        n /= np.linalg.norm(n)
        return float(p[2] - h), n
    if isinstance(s, TriMesh):
        _, dist, normal = _mesh_nearest(s, p)
        return dist, normal
    raise TypeError(f"unknown surface type {type(s).__name__}")


def _project(s: ProxySurface, p: np.ndarray):
    """Nearest feasible point and active constraint normals; no precondition."""
    if isinstance(s, HorizontalPlane):
        d = p[2] - s.height
        if d < -0.0:
            resolved = np.array([p[0], p[1], s.height])
        else:
            resolved = p.copy()
        active = [_UP.copy()] if resolved[2] - s.height <= TOUCH_TOL else []
        return resolved, active
    if isinstance(s, PlaneSet):
        x, y, z, idx, feasible = kernels.project_halfspaces(
            s.normals, s.offsets, p[0], p[1], p[2]
        )
        if not feasible:
            raise InfeasiblePointError("plane set has an empty feasible intersection")
        return np.array([x, y, z]), [s.normals[i].copy() for i in idx]
    if isinstance(s, HeightField):
        d, n = signed_distance(s, p)
        if d < 0.0:
            resolved = np.array([p[0], p[1], p[2] - d])
        else:
            resolved = p.copy()
        d_res, n_res = signed_distance(s, resolved)
        active = [n_res] if d_res <= TOUCH_TOL else []
        return resolved, active
    if isinstance(s, TriMesh):
        q, d, n = _mesh_nearest(s, p)
        # from inside, n already points from the query toward free space
        if d < 0.0:
            return q.copy(), [n]
        active = [n] if abs(d) <= TOUCH_TOL else []
        return p.copy(), active
    raise TypeError(f"unknown surface type {type(s).__name__}")


def resolve_constrained_motion(
    s: ProxySurface, current_c, desired_c
) -> tuple[np.ndarray, ContactState]:
    """Project the desired constraint-node point onto the feasible side.

    The current point must itself be feasible (distance >= -1e-9).  The
    result minimises |x - desired| subject to non-penetration; penetration of
    the raw target is reported, not applied.
    """
    current = np.asarray(current_c, dtype=float)
    desired = np.asarray(desired_c, dtype=float)
    d_cur, _ = signed_distance(s, current)
    if d_cur < -1e-9:
        raise InfeasiblePointError(
            f"current point penetrates the surface by {-d_cur:.3e} m"
        )
    d_des, _ = signed_distance(s, desired)
    resolved, active = _project(s, desired)
    dof_t = 3
    if active:
        rank = int(np.linalg.matrix_rank(np.vstack(active), tol=1e-9))
        dof_t = max(0, 3 - rank)
    state = ContactState(
        in_contact=bool(active),
        active_constraints=tuple(active),
        penetration_raw=max(0.0, -d_des),
        dof_translational=dof_t,
        dof_rotational=2,
        reaction_constraint=np.zeros(3),
        reaction_interface=np.zeros(3),
    )
    return resolved, state


def _nn_reaction(normals: list[np.ndarray], f: np.ndarray) -> np.ndarray:
    """min |f + N.T lam| over lam >= 0, by active-subset enumeration."""
    k = len(normals)
    best = math.inf
    best_r = np.zeros(3)
    indices = list(range(k))
    subsets = [()]
    subsets += [(i,) for i in indices]
    subsets += [(i, j) for i in indices for j in indices[i + 1 :]]
    subsets += [
        (i, j, l)
        for i in indices
        for j in indices[i + 1 :]
        for l in indices[j + 1 :]
    ]
    for S in subsets:
        if S:
            N = np.vstack([normals[i] for i in S])
            G = N @ N.T
            if abs(np.linalg.det(G)) < 1e-12:
                continue
            lam = np.linalg.solve(G, -N @ f)
            if np.any(lam < -1e-12):
                continue
            r = N.T @ lam
        else:
            r = np.zeros(3)
        g = f + r
        # stationarity for excluded normals: no remaining inward component
        if any(float(np.dot(normals[i], g)) < -1e-9 for i in indices if i not in S):
            continue
        obj = float(np.dot(g, g))
        if obj < best - 1e-18:
            best = obj
            best_r = r
    return best_r


def contact_reaction(
    s: ProxySurface, contact: ContactState, applied_interface_force, geom: LinkageGeometry
) -> ContactState:
    """Fill reaction forces for an applied interface-space force.

    The force maps to constraint space by 1/alpha; the unilateral reaction
    cancels its inward normal component and nothing else, so tangential loads
    ride free and pulling away yields zero reaction.
    """
    if not contact.in_contact:
        return contact
    f_c = np.asarray(applied_interface_force, dtype=float) / geom.alpha
    reaction_c = _nn_reaction(list(contact.active_constraints), f_c)
    return dataclasses.replace(
        contact,
        reaction_constraint=reaction_c,
        reaction_interface=geom.alpha * reaction_c,
    )


def rendered_surface(s: ProxySurface, geom: LinkageGeometry) -> ProxySurface:
    """The proxy surface scaled by 1/alpha about the base point."""
    b = geom.base_position
    if isinstance(s, HorizontalPlane):
        return HorizontalPlane(height=float(scale_up(geom, [b[0], b[1], s.height])[2]))
    if isinstance(s, PlaneSet):
        nb = s.normals @ b
        offsets = nb + (s.offsets - nb) / geom.alpha
        return PlaneSet(normals=s.normals.copy(), offsets=offsets)
    if isinstance(s, HeightField):
        origin = b[:2] + (s.origin - b[:2]) / geom.alpha
        heights = b[2] + (s.heights - b[2]) / geom.alpha
        return HeightField(origin=origin, cell=s.cell / geom.alpha, heights=heights)
    if isinstance(s, TriMesh):
        verts = b + (s.vertices - b) / geom.alpha
        return TriMesh(vertices=verts, triangles=s.triangles.copy())
    raise TypeError(f"unknown surface type {type(s).__name__}")


_SURFACE_KEYS = {
    "plane": {"format_version", "type", "height_m"},
    "plane_set": {"format_version", "type", "planes"},
    "heightfield": {"format_version", "type", "origin_m", "cell_m", "heights_m"},
    "trimesh": {"format_version", "type", "vertices_m", "triangles"},
}


def surface_to_dict(s: ProxySurface) -> dict:
    if isinstance(s, HorizontalPlane):
        return {"format_version": 1, "type": "plane", "height_m": s.height}
    if isinstance(s, PlaneSet):
        return {
            "format_version": 1,
            "type": "plane_set",
            "planes": [
                {"normal": [float(v) for v in n], "offset_m": float(o)}
                for n, o in zip(s.normals, s.offsets)
            ],
        }
    if isinstance(s, HeightField):
        return {
            "format_version": 1,
            "type": "heightfield",
            "origin_m": [float(v) for v in s.origin],
            "cell_m": s.cell,
            "heights_m": [[float(v) for v in row] for row in s.heights],
        }
    if isinstance(s, TriMesh):
        return {
            "format_version": 1,
            "type": "trimesh",
            "vertices_m": [[float(v) for v in row] for row in s.vertices],
            "triangles": [[int(v) for v in row] for row in s.triangles],
        }
    raise TypeError(f"unknown surface type {type(s).__name__}")


def surface_from_dict(data: dict) -> ProxySurface:
    if not isinstance(data, dict):
        raise FormatError("surface file must hold a JSON object")
    kind = data.get("type")
    if kind not in _SURFACE_KEYS:
        raise FormatError(f"unknown surface type {kind!r}")
    allowed = _SURFACE_KEYS[kind]
    unknown = set(data) - allowed
    if unknown:
        raise FormatError(f"unknown surface key: {sorted(unknown)[0]!r}")
    missing = allowed - set(data)
    if missing:
        raise FormatError(f"missing surface key: {sorted(missing)[0]!r}")
    if data["format_version"] != 1:
        raise FormatError(f"unsupported format_version {data['format_version']!r}")
    try:
        if kind == "plane":
            return HorizontalPlane(height=float(data["height_m"]))
        if kind == "plane_set":
            planes = data["planes"]
            normals = np.array([p["normal"] for p in planes], dtype=float)
            offsets = np.array([p["offset_m"] for p in planes], dtype=float)
            return PlaneSet(normals=normals, offsets=offsets)
        if kind == "heightfield":
            return HeightField(
                origin=np.array(data["origin_m"], dtype=float),
                cell=float(data["cell_m"]),
                heights=np.array(data["heights_m"], dtype=float),
            )
        return TriMesh(
            vertices=np.array(data["vertices_m"], dtype=float),
            triangles=np.array(data["triangles"], dtype=np.int64),
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatError(f"bad surface payload: {exc}") from exc


def load_surface(path) -> ProxySurface:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"surface file is not valid JSON: {exc}") from exc
    return surface_from_dict(data)


def save_surface(s: ProxySurface, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(surface_to_dict(s), fh, indent=2, sort_keys=True)
        fh.write("\n")
