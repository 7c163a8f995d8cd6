"""Pure-Python geometry kernels.

Reference backend mirrored one-to-one by the compiled module
``pantosim._kernels``.  Keep both in lockstep: identical operation order,
identical tolerances, scalar C-double arithmetic only (``math`` calls map to
the same libm the compiled module uses, so results agree to the last ulp in
practice; tests compare backends at 1e-15).
"""

import math

import numpy as np

# residual at or below which a constraint counts as touching (metres)
TOUCH_TOL = 1e-9
# feasibility slack for projection results (metres)
FEAS_TOL = 1e-9


def fk_points(alpha, l1, l2, bx, by, bz, theta, a1, a2):
    """Bar points O, A, E, B, D, L as a (6, 3) array, world metres.

    L is built through the parallelogram chain L = B + alpha*(E - A), not by
    scaling E about O, so the pantograph identity is a property of the
    construction rather than of the formula under test.
    """
    ct = math.cos(theta)
    st = math.sin(theta)
    c1 = math.cos(a1)
    s1 = math.sin(a1)
    c12 = math.cos(a1 + a2)
    s12 = math.sin(a1 + a2)
    # in-plane (radial, vertical) coordinates of A and E
    ar = l1 * c1
    av = l1 * s1
    er = ar + l2 * c12
    ev = av + l2 * s12
    ax = bx + ar * ct
    ay = by + ar * st
    az = bz + av
    ex = bx + er * ct
    ey = by + er * st
    ez = bz + ev
    out = np.empty((6, 3))
    out[0, 0] = bx
    out[0, 1] = by
    out[0, 2] = bz
    out[1, 0] = ax
    out[1, 1] = ay
    out[1, 2] = az
    out[2, 0] = ex
    out[2, 1] = ey
    out[2, 2] = ez
    # B on the shoulder bar, D on the elbow bar, L closes the parallelogram
    out[3, 0] = bx + alpha * (ax - bx)
    out[3, 1] = by + alpha * (ay - by)
    out[3, 2] = bz + alpha * (az - bz)
    out[4, 0] = ax + alpha * (ex - ax)
    out[4, 1] = ay + alpha * (ey - ay)
    out[4, 2] = az + alpha * (ez - az)
    out[5, 0] = out[3, 0] + alpha * (ex - ax)
    out[5, 1] = out[3, 1] + alpha * (ey - ay)
    out[5, 2] = out[3, 2] + alpha * (ez - az)
    return out


def ik_angles(l1, l2, dx, dy, dz):
    """Raw two-link solve for a base-relative target; no limit checks.

    Returns (theta, a1, a2, r) with the elbow-positive branch (a2 in [0, pi]).
    The cosine is clamped so boundary targets survive rounding.
    """
    rho = math.sqrt(dx * dx + dy * dy)
    r2 = dx * dx + dy * dy + dz * dz
    r = math.sqrt(r2)
    theta = math.atan2(dy, dx) if rho > 0.0 else 0.0
    c2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    if c2 > 1.0:
        c2 = 1.0
    elif c2 < -1.0:
        c2 = -1.0
    a2 = math.acos(c2)
    s2 = math.sin(a2)
    a1 = math.atan2(dz, rho) - math.atan2(l2 * s2, l1 + l2 * c2)
    return theta, a1, a2, r


def in_sector(dx, dy, dz, r_min, r_max, az_lim, el_min, el_max, tol):
    """Membership of a base-relative point in the workspace shell sector.

    ``tol`` is metres on the radius and radians on the angles.
    """
    r = math.sqrt(dx * dx + dy * dy + dz * dz)
    if r < r_min - tol or r > r_max + tol:
        return False
    rho = math.sqrt(dx * dx + dy * dy)
    el = math.atan2(dz, rho)
    if el < el_min - tol or el > el_max + tol:
        return False
    az = math.atan2(dy, dx)
    if az < -az_lim - tol or az > az_lim + tol:
        return False
    return True


def clamp_to_sector(dx, dy, dz, r_min, r_max, az_lim, el_min, el_max):
    """Nearest-in-spherical-coordinates point of the shell sector.

    Points already inside (zero tolerance) are returned bit-identical so
    free-space motion stays untouched by the clamp.
    """
    if in_sector(dx, dy, dz, r_min, r_max, az_lim, el_min, el_max, 0.0):
        return dx, dy, dz
    r = math.sqrt(dx * dx + dy * dy + dz * dz)
    rho = math.sqrt(dx * dx + dy * dy)
    az = math.atan2(dy, dx) if rho > 0.0 else 0.0
    el = math.atan2(dz, rho) if r > 0.0 else 0.0
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
    ce = math.cos(el)
    return r * ce * math.cos(az), r * ce * math.sin(az), r * math.sin(el)


def count_in_sector(dirs, az_lim, el_min, el_max):
    """Count unit directions inside the angular sector (radius ignored)."""
    n = dirs.shape[0]
    count = 0
    for i in range(n):
        x = dirs[i, 0]
        y = dirs[i, 1]
        z = dirs[i, 2]
        rho = math.sqrt(x * x + y * y)
        el = math.atan2(z, rho)
        if el < el_min or el > el_max:
            continue
        az = math.atan2(y, x)
        if az < -az_lim or az > az_lim:
            continue
        count += 1
    return count


def _solve_spd(G, rhs, k):
    """Solve the k x k system G*lam = rhs by Cramer; None when near-singular.

    Normals are unit length, so entries are O(1) and a plain determinant
    threshold is scale-appropriate.
    """
    if k == 1:
        d = G[0][0]
        if abs(d) < 1e-12:
            return None
        return [rhs[0] / d]
    if k == 2:
        d = G[0][0] * G[1][1] - G[0][1] * G[1][0]
        if abs(d) < 1e-12:
            return None
        return [
            (rhs[0] * G[1][1] - G[0][1] * rhs[1]) / d,
            (G[0][0] * rhs[1] - rhs[0] * G[1][0]) / d,
        ]
    d = (
        G[0][0] * (G[1][1] * G[2][2] - G[1][2] * G[2][1])
        - G[0][1] * (G[1][0] * G[2][2] - G[1][2] * G[2][0])
        + G[0][2] * (G[1][0] * G[2][1] - G[1][1] * G[2][0])
    )
    if abs(d) < 1e-12:
        return None
    lam0 = (
        rhs[0] * (G[1][1] * G[2][2] - G[1][2] * G[2][1])
        - G[0][1] * (rhs[1] * G[2][2] - G[1][2] * rhs[2])
        + G[0][2] * (rhs[1] * G[2][1] - G[1][1] * rhs[2])
    ) / d
    lam1 = (
        G[0][0] * (rhs[1] * G[2][2] - G[1][2] * rhs[2])
        - rhs[0] * (G[1][0] * G[2][2] - G[1][2] * G[2][0])
        + G[0][2] * (G[1][0] * rhs[2] - rhs[1] * G[2][0])
    ) / d
    lam2 = (
        G[0][0] * (G[1][1] * rhs[2] - rhs[1] * G[2][1])
        - G[0][1] * (G[1][0] * rhs[2] - rhs[1] * G[2][0])
        + rhs[0] * (G[1][0] * G[2][1] - G[1][1] * G[2][0])
    ) / d
    return [lam0, lam1, lam2]


def _subsets_up_to_3(order):
    """Subsets of size 1..3 of ``order`` in deterministic enumeration order."""
    m = len(order)
    for i in range(m):
        yield (order[i],)
    for i in range(m):
        for j in range(i + 1, m):
            yield (order[i], order[j])
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                yield (order[i], order[j], order[k])


def project_halfspaces(normals, offsets, px, py, pz):
    """Project a point onto the intersection of half-spaces n.x >= b.

    Exact projection via enumeration of candidate active sets (at most three
    independent planes can be active in 3D); enumeration order follows
    violation depth at the query point, so ties resolve deterministically.

    Returns (x, y, z, active, feasible) where ``active`` lists indices of
    constraints touching the resolved point (ascending violation depth at the
    query) and ``feasible`` is False when the intersection is empty.
    """
    m = normals.shape[0]
    res = [0.0] * m
    worst = math.inf
    for i in range(m):
        res[i] = (
            normals[i, 0] * px + normals[i, 1] * py + normals[i, 2] * pz - offsets[i]
        )
        if res[i] < worst:
            worst = res[i]
    if worst >= -1e-12:
        active = [i for i in range(m) if res[i] <= TOUCH_TOL]
        active.sort(key=lambda i: (res[i], i))
        return px, py, pz, active, True
    order = sorted(range(m), key=lambda i: (res[i], i))
    best_d2 = math.inf
    bx = by = bz = 0.0
    found = False
    for S in _subsets_up_to_3(order):
        k = len(S)
        G = [[0.0] * k for _ in range(k)]
        rhs = [0.0] * k
        for a in range(k):
            ia = S[a]
            for b in range(k):
                ib = S[b]
                G[a][b] = (
                    normals[ia, 0] * normals[ib, 0]
                    + normals[ia, 1] * normals[ib, 1]
                    + normals[ia, 2] * normals[ib, 2]
                )
            rhs[a] = -res[ia]
        lam = _solve_spd(G, rhs, k)
        if lam is None:
            continue
        ok = True
        for a in range(k):
            if lam[a] < -1e-12:
                ok = False
                break
        if not ok:
            continue
        x = px
        y = py
        z = pz
        for a in range(k):
            ia = S[a]
            x += lam[a] * normals[ia, 0]
            y += lam[a] * normals[ia, 1]
            z += lam[a] * normals[ia, 2]
        feas = True
        for i in range(m):
            ri = normals[i, 0] * x + normals[i, 1] * y + normals[i, 2] * z - offsets[i]
            if ri < -FEAS_TOL:
                feas = False
                break
        if not feas:
            continue
        d2 = (x - px) * (x - px) + (y - py) * (y - py) + (z - pz) * (z - pz)
        if d2 < best_d2:
            best_d2 = d2
            bx, by, bz = x, y, z
            found = True
    if not found:
        return px, py, pz, [], False
    active = []
    for i in range(m):
        ri = normals[i, 0] * bx + normals[i, 1] * by + normals[i, 2] * bz - offsets[i]
        if ri <= TOUCH_TOL:
            active.append(i)
    active.sort(key=lambda i: (res[i], i))
    return bx, by, bz, active, True


def heightfield_query(ox, oy, cell, heights, x, y):
    """Bilinear height and gradient at (x, y).

    Returns (status, h, dhdx, dhdy); status 1 means the point lies outside
    the grid footprint.  ``heights`` is row-major with rows along y.
    """
    rows = heights.shape[0]
    cols = heights.shape[1]
    fx = (x - ox) / cell
    fy = (y - oy) / cell
    if fx < 0.0 or fy < 0.0 or fx > cols - 1.0 or fy > rows - 1.0:
        return 1, 0.0, 0.0, 0.0
    i = int(fx)
    if i > cols - 2:
        i = cols - 2
    j = int(fy)
    if j > rows - 2:
        j = rows - 2
    tx = fx - i
    ty = fy - j
    h00 = heights[j, i]
    h10 = heights[j, i + 1]
    h01 = heights[j + 1, i]
    h11 = heights[j + 1, i + 1]
    h = (1.0 - ty) * ((1.0 - tx) * h00 + tx * h10) + ty * ((1.0 - tx) * h01 + tx * h11)
    dhdx = ((1.0 - ty) * (h10 - h00) + ty * (h11 - h01)) / cell
    dhdy = ((1.0 - tx) * (h01 - h00) + tx * (h11 - h10)) / cell
    return 0, h, dhdx, dhdy


def actuator_advance(height, setpoint, kp, v_up, v_down, dt, sub_dt):
    """Advance the proportional height controller by dt with sub-stepping.

    Returns (height', first_command).  The command is clamped to the
    asymmetric speed limits; a sub-step that would cross the setpoint snaps
    onto it, so the controller never overshoots.  Axial load is deliberately
    not an input: the lead screw is self-locking.
    """
    n = int(math.ceil(dt / sub_dt - 1e-12))
    if n < 1:
        n = 1
    sub = dt / n
    first = 0.0
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
        if abs(dh) >= abs(err) or new_height == height:
            height = setpoint
        else:
            height = new_height
    return height, first


def erase_tiles(cx_arr, cy_arr, erased, px, py, radius):
    """Erase tiles whose centres lie within ``radius`` of (px, py); in place.

    Returns the number of newly erased tiles.
    """
    n = cx_arr.shape[0]
    r2 = radius * radius
    newly = 0
    for i in range(n):
        if erased[i]:
            continue
        dx = cx_arr[i] - px
        dy = cy_arr[i] - py
        if dx * dx + dy * dy <= r2:
            erased[i] = 1
            newly += 1
    return newly
