# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry kernels.

Mirror of pantosim._kernels_py, one function to one function; keep the
operation order identical so both backends agree to the last ulp.
"""

from libc.math cimport atan2, acos, ceil, cos, fabs, sin, sqrt, INFINITY

import numpy as np

TOUCH_TOL = 1e-9
FEAS_TOL = 1e-9


def fk_points(double alpha, double l1, double l2, double bx, double by, double bz,
              double theta, double a1, double a2):
    """Bar points O, A, E, B, D, L as a (6, 3) array, world metres."""
    cdef double ct = cos(theta)
    cdef double st = sin(theta)
    cdef double c1 = cos(a1)
    cdef double s1 = sin(a1)
    cdef double c12 = cos(a1 + a2)
    cdef double s12 = sin(a1 + a2)
    cdef double ar = l1 * c1
    cdef double av = l1 * s1
    cdef double er = ar + l2 * c12
    cdef double ev = av + l2 * s12
    cdef double ax = bx + ar * ct
    cdef double ay = by + ar * st
    cdef double az = bz + av
    cdef double ex = bx + er * ct
    cdef double ey = by + er * st
    cdef double ez = bz + ev
    out = np.empty((6, 3))
    cdef double[:, ::1] o = out
    o[0, 0] = bx
    o[0, 1] = by
    o[0, 2] = bz
    o[1, 0] = ax
    o[1, 1] = ay
    o[1, 2] = az
    o[2, 0] = ex
    o[2, 1] = ey
    o[2, 2] = ez
    o[3, 0] = bx + alpha * (ax - bx)
    o[3, 1] = by + alpha * (ay - by)
    o[3, 2] = bz + alpha * (az - bz)
    o[4, 0] = ax + alpha * (ex - ax)
    o[4, 1] = ay + alpha * (ey - ay)
    o[4, 2] = az + alpha * (ez - az)
    o[5, 0] = o[3, 0] + alpha * (ex - ax)
    o[5, 1] = o[3, 1] + alpha * (ey - ay)
    o[5, 2] = o[3, 2] + alpha * (ez - az)
    return out


def ik_angles(double l1, double l2, double dx, double dy, double dz):
    """Raw two-link solve; elbow-positive branch, no limit checks."""
    cdef double rho = sqrt(dx * dx + dy * dy)
    cdef double r2 = dx * dx + dy * dy + dz * dz
    cdef double r = sqrt(r2)
    cdef double theta = atan2(dy, dx) if rho > 0.0 else 0.0
    cdef double c2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    if c2 > 1.0:
        c2 = 1.0
    elif c2 < -1.0:
        c2 = -1.0
    cdef double a2 = acos(c2)
    cdef double s2 = sin(a2)
    cdef double a1 = atan2(dz, rho) - atan2(l2 * s2, l1 + l2 * c2)
    return theta, a1, a2, r


cdef bint _in_sector(double dx, double dy, double dz, double r_min, double r_max,
                     double az_lim, double el_min, double el_max, double tol) noexcept:
    cdef double r = sqrt(dx * dx + dy * dy + dz * dz)
    if r < r_min - tol or r > r_max + tol:
        return False
    cdef double rho = sqrt(dx * dx + dy * dy)
    cdef double el = atan2(dz, rho)
    if el < el_min - tol or el > el_max + tol:
        return False
    cdef double az = atan2(dy, dx)
    if az < -az_lim - tol or az > az_lim + tol:
        return False
    return True


def in_sector(double dx, double dy, double dz, double r_min, double r_max,
              double az_lim, double el_min, double el_max, double tol):
    """Membership of a base-relative point in the workspace shell sector."""
    return bool(_in_sector(dx, dy, dz, r_min, r_max, az_lim, el_min, el_max, tol))


def clamp_to_sector(double dx, double dy, double dz, double r_min, double r_max,
                    double az_lim, double el_min, double el_max):
    """Spherical-coordinate clamp; in-sector points return bit-identical."""
    if _in_sector(dx, dy, dz, r_min, r_max, az_lim, el_min, el_max, 0.0):
        return dx, dy, dz
    cdef double r = sqrt(dx * dx + dy * dy + dz * dz)
    cdef double rho = sqrt(dx * dx + dy * dy)
    cdef double az = atan2(dy, dx) if rho > 0.0 else 0.0
    cdef double el = atan2(dz, rho) if r > 0.0 else 0.0
    if az < -az_lim:
        az = -az_lim
    elif az > az_lim:
        az = az_lim
    if el < el_min:
        el = el_min
    elif el > el_max:
        el = el_max
    if r < r_min:
        r = r_min
    elif r > r_max:
        r = r_max
    cdef double ce = cos(el)
    return r * ce * cos(az), r * ce * sin(az), r * sin(el)


def count_in_sector(double[:, ::1] dirs, double az_lim, double el_min, double el_max):
    """Count unit directions inside the angular sector (radius ignored)."""
    cdef Py_ssize_t n = dirs.shape[0]
    cdef Py_ssize_t i
    cdef long count = 0
    cdef double x, y, z, rho, el, az
    for i in range(n):
        x = dirs[i, 0]
        y = dirs[i, 1]
        z = dirs[i, 2]
        rho = sqrt(x * x + y * y)
        el = atan2(z, rho)
        if el < el_min or el > el_max:
            continue
        az = atan2(y, x)
        if az < -az_lim or az > az_lim:
            continue
        count += 1
    return count


cdef int _solve_spd(double G[3][3], double rhs[3], int k, double lam[3]) noexcept:
    """Cramer solve of the k x k system; returns 0 when near-singular."""
    cdef double d
    if k == 1:
        d = G[0][0]
        if fabs(d) < 1e-12:
            return 0
        lam[0] = rhs[0] / d
        return 1
    if k == 2:
        d = G[0][0] * G[1][1] - G[0][1] * G[1][0]
        if fabs(d) < 1e-12:
            return 0
        lam[0] = (rhs[0] * G[1][1] - G[0][1] * rhs[1]) / d
        lam[1] = (G[0][0] * rhs[1] - rhs[0] * G[1][0]) / d
        return 1
    d = (G[0][0] * (G[1][1] * G[2][2] - G[1][2] * G[2][1])
         - G[0][1] * (G[1][0] * G[2][2] - G[1][2] * G[2][0])
         + G[0][2] * (G[1][0] * G[2][1] - G[1][1] * G[2][0]))
    if fabs(d) < 1e-12:
        return 0
    lam[0] = (rhs[0] * (G[1][1] * G[2][2] - G[1][2] * G[2][1])
              - G[0][1] * (rhs[1] * G[2][2] - G[1][2] * rhs[2])
              + G[0][2] * (rhs[1] * G[2][1] - G[1][1] * rhs[2])) / d
    lam[1] = (G[0][0] * (rhs[1] * G[2][2] - G[1][2] * rhs[2])
              - rhs[0] * (G[1][0] * G[2][2] - G[1][2] * G[2][0])
              + G[0][2] * (G[1][0] * rhs[2] - rhs[1] * G[2][0])) / d
    lam[2] = (G[0][0] * (G[1][1] * rhs[2] - rhs[1] * G[2][1])
              - G[0][1] * (G[1][0] * rhs[2] - rhs[1] * G[2][0])
              + rhs[0] * (G[1][0] * G[2][1] - G[1][1] * G[2][0])) / d
    return 1


cdef void _try_subset(double[:, ::1] normals, double[::1] offsets, double[::1] res,
                      double px, double py, double pz,
                      Py_ssize_t* S, int ksize, double* best) noexcept:
    """Evaluate one candidate active set; best = [d2, x, y, z, found]."""
    cdef double G[3][3]
    cdef double rhs[3]
    cdef double lam[3]
    cdef Py_ssize_t a, b, j, ia, ib
    cdef Py_ssize_t m = normals.shape[0]
    cdef double x, y, z, ri, d2
    for a in range(ksize):
        ia = S[a]
        for b in range(ksize):
            ib = S[b]
            G[a][b] = (normals[ia, 0] * normals[ib, 0]
                       + normals[ia, 1] * normals[ib, 1]
                       + normals[ia, 2] * normals[ib, 2])
        rhs[a] = -res[ia]
    if not _solve_spd(G, rhs, ksize, lam):
        return
    for a in range(ksize):
        if lam[a] < -1e-12:
            return
    x = px
    y = py
    z = pz
    for a in range(ksize):
        ia = S[a]
        x += lam[a] * normals[ia, 0]
        y += lam[a] * normals[ia, 1]
        z += lam[a] * normals[ia, 2]
    for j in range(m):
        ri = normals[j, 0] * x + normals[j, 1] * y + normals[j, 2] * z - offsets[j]
        if ri < -FEAS_TOL:
            return
    d2 = (x - px) * (x - px) + (y - py) * (y - py) + (z - pz) * (z - pz)
    if d2 < best[0]:
        best[0] = d2
        best[1] = x
        best[2] = y
        best[3] = z
        best[4] = 1.0


def project_halfspaces(double[:, ::1] normals, double[::1] offsets,
                       double px, double py, double pz):
    """Exact projection onto the intersection of half-spaces n.x >= b.

    Candidate active sets of size 1..3 are enumerated in violation-depth
    order; returns (x, y, z, active, feasible).
    """
    cdef Py_ssize_t m = normals.shape[0]
    res_arr = np.empty(m)
    cdef double[::1] res = res_arr
    cdef Py_ssize_t i, j, k
    cdef double worst = INFINITY
    for i in range(m):
        res[i] = normals[i, 0] * px + normals[i, 1] * py + normals[i, 2] * pz - offsets[i]
        if res[i] < worst:
            worst = res[i]
    cdef list active
    if worst >= -1e-12:
        active = [i for i in range(m) if res[i] <= TOUCH_TOL]
        active.sort(key=lambda idx: (res_arr[idx], idx))
        return px, py, pz, active, True
    order_arr = np.array(sorted(range(m), key=lambda idx: (res_arr[idx], idx)),
                         dtype=np.int64)
    cdef long[::1] order = order_arr
    cdef Py_ssize_t S[3]
    cdef double best[5]
    best[0] = INFINITY
    best[1] = best[2] = best[3] = best[4] = 0.0
    for i in range(m):
        S[0] = order[i]
        _try_subset(normals, offsets, res, px, py, pz, S, 1, best)
    for i in range(m):
        S[0] = order[i]
        for j in range(i + 1, m):
            S[1] = order[j]
            _try_subset(normals, offsets, res, px, py, pz, S, 2, best)
    for i in range(m):
        S[0] = order[i]
        for j in range(i + 1, m):
            S[1] = order[j]
            for k in range(j + 1, m):
                S[2] = order[k]
                _try_subset(normals, offsets, res, px, py, pz, S, 3, best)
    if best[4] == 0.0:
        return px, py, pz, [], False
    cdef double bx = best[1]
    cdef double by = best[2]
    cdef double bz = best[3]
    cdef double ri
    active = []
    for i in range(m):
        ri = normals[i, 0] * bx + normals[i, 1] * by + normals[i, 2] * bz - offsets[i]
        if ri <= TOUCH_TOL:
            active.append(i)
    active.sort(key=lambda idx: (res_arr[idx], idx))
    return bx, by, bz, active, True


def heightfield_query(double ox, double oy, double cell, double[:, ::1] heights,
                      double x, double y):
    """Bilinear height and gradient; status 1 when outside the footprint."""
    cdef Py_ssize_t rows = heights.shape[0]
    cdef Py_ssize_t cols = heights.shape[1]
    cdef double fx = (x - ox) / cell
    cdef double fy = (y - oy) / cell
    if fx < 0.0 or fy < 0.0 or fx > cols - 1.0 or fy > rows - 1.0:
        return 1, 0.0, 0.0, 0.0
    cdef Py_ssize_t i = <Py_ssize_t>fx
    if i > cols - 2:
        i = cols - 2
    cdef Py_ssize_t j = <Py_ssize_t>fy
    if j > rows - 2:
        j = rows - 2
    cdef double tx = fx - i
    cdef double ty = fy - j
    cdef double h00 = heights[j, i]
    cdef double h10 = heights[j, i + 1]
    cdef double h01 = heights[j + 1, i]
    cdef double h11 = heights[j + 1, i + 1]
    cdef double h = (1.0 - ty) * ((1.0 - tx) * h00 + tx * h10) + ty * ((1.0 - tx) * h01 + tx * h11)
    cdef double dhdx = ((1.0 - ty) * (h10 - h00) + ty * (h11 - h01)) / cell
    cdef double dhdy = ((1.0 - tx) * (h01 - h00) + tx * (h11 - h10)) / cell
    return 0, h, dhdx, dhdy


def actuator_advance(double height, double setpoint, double kp, double v_up,
                     double v_down, double dt, double sub_dt):
    """Sub-stepped proportional height update; (height', first_command)."""
    cdef long n = <long>ceil(dt / sub_dt - 1e-12)
    if n < 1:
        n = 1
    cdef double sub = dt / n
    cdef double first = 0.0
    cdef double err, cmd, dh, new_height
    cdef long k
    for k in range(n):
        err = setpoint - height
        cmd = kp * err
        if cmd > v_up:
            cmd = v_up
        elif cmd < -v_down:
            cmd = -v_down
        if k == 0:
            first = cmd
        dh = cmd * sub
        new_height = height + dh
        # snap on crossing, and on stall (step too small to represent),
        # so arrival is exact instead of freezing an ulp short
        if fabs(dh) >= fabs(err) or new_height == height:
            height = setpoint
        else:
            height = new_height
    return height, first


def erase_tiles(double[::1] cx_arr, double[::1] cy_arr, unsigned char[::1] erased,
                double px, double py, double radius):
    """Erase tiles within ``radius`` of (px, py), in place; returns new count."""
    cdef Py_ssize_t n = cx_arr.shape[0]
    cdef double r2 = radius * radius
    cdef long newly = 0
    cdef Py_ssize_t i
    cdef double dx, dy
    for i in range(n):
        if erased[i]:
            continue
        dx = cx_arr[i] - px
        dy = cy_arr[i] - py
        if dx * dx + dy * dy <= r2:
            erased[i] = 1
            newly += 1
    return newly
