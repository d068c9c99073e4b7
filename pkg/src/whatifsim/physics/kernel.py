"""JIT-compiled rigid body kernel: collision detection on primitives and a
sequential-impulse contact solver with Coulomb friction and restitution.

State layout (N bodies, body 0 is the static table):
    kind      int64[N]      0 = box, 1 = sphere, 2 = cylinder
    dims      float64[N,3]  box: half extents; sphere: (r,0,0);
                            cylinder: (r, half_height, segment_half)
    pos       float64[N,3]  center of mass, world frame
    rot       float64[N,9]  row-major rotation, world from body
    vel/omega float64[N,3]  linear / angular velocity, world frame

Solver notes:
 - Contacts are generated *before* positions integrate, with a speculative
   margin, so approaching bodies are caught a step early and stopped exactly
   at the surface. Impulse targets include the half-gravity-step term, which
   makes a resting body an exact fixed point of the step map.
 - Penetration left over from complex manifolds is relieved by positional
   projection whose potential-energy cost is capped by a fraction of the
   kinetic energy the solver dissipated that step, so a step can never pump
   energy into the system.
 - Rotations integrate by the exact exponential map; with angular velocity
   fixed over a step this conserves body-frame angular velocity and therefore
   rotational kinetic energy exactly during free motion.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

BOX = 0
SPHERE = 1
CYLINDER = 2

MAX_CONTACTS = 128


@njit(cache=True)
def _mat_vec(R, x, y, z):
    """R @ v for a row-major 9-vector rotation."""
    return (
        R[0] * x + R[1] * y + R[2] * z,
        R[3] * x + R[4] * y + R[5] * z,
        R[6] * x + R[7] * y + R[8] * z,
    )


@njit(cache=True)
def _mat_tvec(R, x, y, z):
    """R^T @ v."""
    return (
        R[0] * x + R[3] * y + R[6] * z,
        R[1] * x + R[4] * y + R[7] * z,
        R[2] * x + R[5] * y + R[8] * z,
    )


@njit(cache=True)
def _apply_inv_inertia(R, ibinv, x, y, z):
    """(R diag(ibinv) R^T) @ v: world-frame inverse inertia application."""
    bx, by, bz = _mat_tvec(R, x, y, z)
    bx *= ibinv[0]
    by *= ibinv[1]
    bz *= ibinv[2]
    return _mat_vec(R, bx, by, bz)


@njit(cache=True)
def _support_radius(R, hx, hy, hz, nx, ny, nz):
    """Projection half-width of an oriented box onto direction n."""
    # |n . column_k| for each body axis column of R
    cx = abs(R[0] * nx + R[3] * ny + R[6] * nz)
    cy = abs(R[1] * nx + R[4] * ny + R[7] * nz)
    cz = abs(R[2] * nx + R[5] * ny + R[8] * nz)
    return hx * cx + hy * cy + hz * cz


@njit(cache=True)
def _rodrigues_inplace(R, wx, wy, wz, dt):
    """R <- exp(hat(w) * dt) @ R, exact for the angle |w| dt."""
    theta = math.sqrt(wx * wx + wy * wy + wz * wz) * dt
    if theta < 1e-14:
        return
    inv = 1.0 / math.sqrt(wx * wx + wy * wy + wz * wz)
    kx = wx * inv
    ky = wy * inv
    kz = wz * inv
    s = math.sin(theta)
    c = math.cos(theta)
    t = 1.0 - c
    # Rotation matrix Q = I + s*K + t*K^2 for unit axis k
    q00 = c + t * kx * kx
    q01 = t * kx * ky - s * kz
    q02 = t * kx * kz + s * ky
    q10 = t * ky * kx + s * kz
    q11 = c + t * ky * ky
    q12 = t * ky * kz - s * kx
    q20 = t * kz * kx - s * ky
    q21 = t * kz * ky + s * kx
    q22 = c + t * kz * kz
    r0 = R[0]
    r1 = R[1]
    r2 = R[2]
    r3 = R[3]
    r4 = R[4]
    r5 = R[5]
    r6 = R[6]
    r7 = R[7]
    r8 = R[8]
    R[0] = q00 * r0 + q01 * r3 + q02 * r6
    R[1] = q00 * r1 + q01 * r4 + q02 * r7
    R[2] = q00 * r2 + q01 * r5 + q02 * r8
    R[3] = q10 * r0 + q11 * r3 + q12 * r6
    R[4] = q10 * r1 + q11 * r4 + q12 * r7
    R[5] = q10 * r2 + q11 * r5 + q12 * r8
    R[6] = q20 * r0 + q21 * r3 + q22 * r6
    R[7] = q20 * r1 + q21 * r4 + q22 * r7
    R[8] = q20 * r2 + q21 * r5 + q22 * r8


@njit(cache=True)
def _emit(c_a, c_b, c_p, c_n, c_sep, m, a, b, px, py, pz, nx, ny, nz, sep):
    if m >= c_a.shape[0]:
        return m
    c_a[m] = a
    c_b[m] = b
    c_p[m, 0] = px
    c_p[m, 1] = py
    c_p[m, 2] = pz
    c_n[m, 0] = nx
    c_n[m, 1] = ny
    c_n[m, 2] = nz
    c_sep[m] = sep
    return m + 1


@njit(cache=True)
def _lateral_ok(pos, rot, dims, b, qx, qy, qz, nx, ny, nz, pad):
    """True if world point q lies within box b's cross-section transverse to n."""
    R = rot[b]
    lx, ly, lz = _mat_tvec(R, qx - pos[b, 0], qy - pos[b, 1], qz - pos[b, 2])
    nlx, nly, nlz = _mat_tvec(R, nx, ny, nz)
    if abs(nlx) < 0.9 and abs(lx) > dims[b, 0] + pad:
        return False
    if abs(nly) < 0.9 and abs(ly) > dims[b, 1] + pad:
        return False
    if abs(nlz) < 0.9 and abs(lz) > dims[b, 2] + pad:
        return False
    return True


@njit(cache=True)
def _collide_sphere_sphere(pos, dims, a, b, margin, c_a, c_b, c_p, c_n, c_sep, m):
    dx = pos[a, 0] - pos[b, 0]
    dy = pos[a, 1] - pos[b, 1]
    dz = pos[a, 2] - pos[b, 2]
    d = math.sqrt(dx * dx + dy * dy + dz * dz)
    ra = dims[a, 0]
    rb = dims[b, 0]
    sep = d - ra - rb
    if sep > margin:
        return m
    if d > 1e-12:
        nx = dx / d
        ny = dy / d
        nz = dz / d
    else:
        nx = 0.0
        ny = 0.0
        nz = 1.0
    px = pos[a, 0] - nx * ra
    py = pos[a, 1] - ny * ra
    pz = pos[a, 2] - nz * ra
    return _emit(c_a, c_b, c_p, c_n, c_sep, m, a, b, px, py, pz, nx, ny, nz, sep)


@njit(cache=True)
def _collide_sphere_box(pos, rot, dims, s, b, margin, c_a, c_b, c_p, c_n, c_sep, m):
    """Sphere s against box b; emits contact (a=s, b=b), normal box -> sphere."""
    R = rot[b]
    cx, cy, cz = _mat_tvec(
        R, pos[s, 0] - pos[b, 0], pos[s, 1] - pos[b, 1], pos[s, 2] - pos[b, 2]
    )
    hx = dims[b, 0]
    hy = dims[b, 1]
    hz = dims[b, 2]
    qx = min(max(cx, -hx), hx)
    qy = min(max(cy, -hy), hy)
    qz = min(max(cz, -hz), hz)
    dx = cx - qx
    dy = cy - qy
    dz = cz - qz
    d2 = dx * dx + dy * dy + dz * dz
    r = dims[s, 0]
    if d2 > 1e-18:
        d = math.sqrt(d2)
        sep = d - r
        if sep > margin:
            return m
        nlx = dx / d
        nly = dy / d
        nlz = dz / d
    else:
        # Center inside the box: climb out through the least-penetrated face.
        px_ = hx - abs(cx)
        py_ = hy - abs(cy)
        pz_ = hz - abs(cz)
        if px_ <= py_ and px_ <= pz_:
            nlx = 1.0 if cx >= 0.0 else -1.0
            nly = 0.0
            nlz = 0.0
            sep = -px_ - r
        elif py_ <= pz_:
            nlx = 0.0
            nly = 1.0 if cy >= 0.0 else -1.0
            nlz = 0.0
            sep = -py_ - r
        else:
            nlx = 0.0
            nly = 0.0
            nlz = 1.0 if cz >= 0.0 else -1.0
            sep = -pz_ - r
    nx, ny, nz = _mat_vec(R, nlx, nly, nlz)
    wx, wy, wz = _mat_vec(R, qx, qy, qz)
    px = pos[b, 0] + wx
    py = pos[b, 1] + wy
    pz = pos[b, 2] + wz
    return _emit(c_a, c_b, c_p, c_n, c_sep, m, s, b, px, py, pz, nx, ny, nz, sep)


@njit(cache=True)
def _box_vertices(pos, rot, dims, i, out):
    R = rot[i]
    hx = dims[i, 0]
    hy = dims[i, 1]
    hz = dims[i, 2]
    k = 0
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            for sz in (-1.0, 1.0):
                wx, wy, wz = _mat_vec(R, sx * hx, sy * hy, sz * hz)
                out[k, 0] = pos[i, 0] + wx
                out[k, 1] = pos[i, 1] + wy
                out[k, 2] = pos[i, 2] + wz
                k += 1


@njit(cache=True)
def _collide_box_box(
    pos, rot, dims, a, b, margin, pad, verts, c_a, c_b, c_p, c_n, c_sep, m
):
    """Oriented box pair via face-axis SAT plus vertex containment manifold."""
    dx = pos[a, 0] - pos[b, 0]
    dy = pos[a, 1] - pos[b, 1]
    dz = pos[a, 2] - pos[b, 2]
    best_sep = -1e30
    bnx = 0.0
    bny = 0.0
    bnz = 1.0
    for src in range(2):
        body = a if src == 0 else b
        R = rot[body]
        for k in range(3):
            ax = R[k]
            ay = R[3 + k]
            az = R[6 + k]
            ra = _support_radius(rot[a], dims[a, 0], dims[a, 1], dims[a, 2], ax, ay, az)
            rb = _support_radius(rot[b], dims[b, 0], dims[b, 1], dims[b, 2], ax, ay, az)
            proj = dx * ax + dy * ay + dz * az
            sep = abs(proj) - ra - rb
            if sep > best_sep:
                best_sep = sep
                if proj >= 0.0:
                    bnx = ax
                    bny = ay
                    bnz = az
                else:
                    bnx = -ax
                    bny = -ay
                    bnz = -az
    if best_sep > margin:
        return m

    m0 = m
    # Vertices of a measured against b's support plane along n.
    plane_b = (
        bnx * pos[b, 0]
        + bny * pos[b, 1]
        + bnz * pos[b, 2]
        + _support_radius(rot[b], dims[b, 0], dims[b, 1], dims[b, 2], bnx, bny, bnz)
    )
    _box_vertices(pos, rot, dims, a, verts)
    for k in range(8):
        vx = verts[k, 0]
        vy = verts[k, 1]
        vz = verts[k, 2]
        sep = bnx * vx + bny * vy + bnz * vz - plane_b
        if sep < margin and _lateral_ok(pos, rot, dims, b, vx, vy, vz, bnx, bny, bnz, pad):
            m = _emit(c_a, c_b, c_p, c_n, c_sep, m, a, b, vx, vy, vz, bnx, bny, bnz, sep)
    # Vertices of b measured against a's support plane along -n.
    plane_a = (
        bnx * pos[a, 0]
        + bny * pos[a, 1]
        + bnz * pos[a, 2]
        - _support_radius(rot[a], dims[a, 0], dims[a, 1], dims[a, 2], bnx, bny, bnz)
    )
    _box_vertices(pos, rot, dims, b, verts)
    for k in range(8):
        vx = verts[k, 0]
        vy = verts[k, 1]
        vz = verts[k, 2]
        sep = plane_a - (bnx * vx + bny * vy + bnz * vz)
        if sep < margin and _lateral_ok(pos, rot, dims, a, vx, vy, vz, bnx, bny, bnz, pad):
            m = _emit(c_a, c_b, c_p, c_n, c_sep, m, a, b, vx, vy, vz, bnx, bny, bnz, sep)
    if m == m0:
        # Edge-crossing residue: fall back to a's deepest vertex along -n.
        _box_vertices(pos, rot, dims, a, verts)
        deepest = 0
        dmin = 1e30
        for k in range(8):
            h = bnx * verts[k, 0] + bny * verts[k, 1] + bnz * verts[k, 2]
            if h < dmin:
                dmin = h
                deepest = k
        sep = dmin - plane_b
        m = _emit(
            c_a,
            c_b,
            c_p,
            c_n,
            c_sep,
            m,
            a,
            b,
            verts[deepest, 0],
            verts[deepest, 1],
            verts[deepest, 2],
            bnx,
            bny,
            bnz,
            sep,
        )
    return m


@njit(cache=True)
def _closest_on_segment(px, py, pz, ax, ay, az, half, x, y, z):
    """Closest point to (x,y,z) on the segment center p, axis a, half-length."""
    t = (x - px) * ax + (y - py) * ay + (z - pz) * az
    if t > half:
        t = half
    elif t < -half:
        t = -half
    return px + ax * t, py + ay * t, pz + az * t


@njit(cache=True)
def _collide_sphere_cyl(pos, rot, dims, s, c, margin, c_a, c_b, c_p, c_n, c_sep, m):
    """Sphere s vs cylinder c treated as a capsule; normal cylinder -> sphere."""
    R = rot[c]
    ax = R[2]
    ay = R[5]
    az = R[8]
    seg = dims[c, 2]
    qx, qy, qz = _closest_on_segment(
        pos[c, 0], pos[c, 1], pos[c, 2], ax, ay, az, seg, pos[s, 0], pos[s, 1], pos[s, 2]
    )
    dx = pos[s, 0] - qx
    dy = pos[s, 1] - qy
    dz = pos[s, 2] - qz
    d = math.sqrt(dx * dx + dy * dy + dz * dz)
    rs = dims[s, 0]
    rc = dims[c, 0]
    sep = d - rs - rc
    if sep > margin:
        return m
    if d > 1e-12:
        nx = dx / d
        ny = dy / d
        nz = dz / d
    else:
        nx = 0.0
        ny = 0.0
        nz = 1.0
    px = pos[s, 0] - nx * rs
    py = pos[s, 1] - ny * rs
    pz = pos[s, 2] - nz * rs
    return _emit(c_a, c_b, c_p, c_n, c_sep, m, s, c, px, py, pz, nx, ny, nz, sep)


@njit(cache=True)
def _perp_basis(ax, ay, az):
    if abs(ax) < 0.9:
        ux = 0.0
        uy = -az
        uz = ay
    else:
        ux = az
        uy = 0.0
        uz = -ax
    un = math.sqrt(ux * ux + uy * uy + uz * uz)
    ux /= un
    uy /= un
    uz /= un
    vx = ay * uz - az * uy
    vy = az * ux - ax * uz
    vz = ax * uy - ay * ux
    return ux, uy, uz, vx, vy, vz


@njit(cache=True)
def _collide_cyl_box(
    pos, rot, dims, c, b, margin, pad, c_a, c_b, c_p, c_n, c_sep, m
):
    """Cylinder c vs box b. Capsule narrow phase plus flat-cap rim contacts so
    an upright cylinder rests stably on a face; normal points box -> cylinder."""
    Rc = rot[c]
    ax = Rc[2]
    ay = Rc[5]
    az = Rc[8]
    r = dims[c, 0]
    hh = dims[c, 1]
    seg = dims[c, 2]
    Rb = rot[b]
    hbx = dims[b, 0]
    hby = dims[b, 1]
    hbz = dims[b, 2]
    # Segment in box frame.
    s0x, s0y, s0z = _mat_tvec(
        Rb, pos[c, 0] - pos[b, 0], pos[c, 1] - pos[b, 1], pos[c, 2] - pos[b, 2]
    )
    alx, aly, alz = _mat_tvec(Rb, ax, ay, az)

    # Distance from segment point at parameter t to the box is convex in t:
    # ternary search.
    lo = -seg
    hi = seg
    for _ in range(40):
        t1 = lo + (hi - lo) / 3.0
        t2 = hi - (hi - lo) / 3.0
        d1x = max(abs(s0x + alx * t1) - hbx, 0.0)
        d1y = max(abs(s0y + aly * t1) - hby, 0.0)
        d1z = max(abs(s0z + alz * t1) - hbz, 0.0)
        d2x = max(abs(s0x + alx * t2) - hbx, 0.0)
        d2y = max(abs(s0y + aly * t2) - hby, 0.0)
        d2z = max(abs(s0z + alz * t2) - hbz, 0.0)
        if d1x * d1x + d1y * d1y + d1z * d1z <= d2x * d2x + d2y * d2y + d2z * d2z:
            hi = t2
        else:
            lo = t1
    t = 0.5 * (lo + hi)
    ptx = s0x + alx * t
    pty = s0y + aly * t
    ptz = s0z + alz * t
    qx = min(max(ptx, -hbx), hbx)
    qy = min(max(pty, -hby), hby)
    qz = min(max(ptz, -hbz), hbz)
    dx = ptx - qx
    dy = pty - qy
    dz = ptz - qz
    d2 = dx * dx + dy * dy + dz * dz
    if d2 > 1e-18:
        d = math.sqrt(d2)
        sep = d - r
        if sep > margin:
            return m
        nlx = dx / d
        nly = dy / d
        nlz = dz / d
    else:
        # Segment point inside the box: least-penetrated face.
        px_ = hbx - abs(ptx)
        py_ = hby - abs(pty)
        pz_ = hbz - abs(ptz)
        if px_ <= py_ and px_ <= pz_:
            nlx = 1.0 if ptx >= 0.0 else -1.0
            nly = 0.0
            nlz = 0.0
            sep = -px_ - r
        elif py_ <= pz_:
            nlx = 0.0
            nly = 1.0 if pty >= 0.0 else -1.0
            nlz = 0.0
            sep = -py_ - r
        else:
            nlx = 0.0
            nly = 0.0
            nlz = 1.0 if ptz >= 0.0 else -1.0
            sep = -pz_ - r
    nx, ny, nz = _mat_vec(Rb, nlx, nly, nlz)
    align = abs(nx * ax + ny * ay + nz * az)
    plane_b = (
        nx * pos[b, 0]
        + ny * pos[b, 1]
        + nz * pos[b, 2]
        + _support_radius(Rb, hbx, hby, hbz, nx, ny, nz)
    )
    m0 = m
    if align > 0.85:
        # Flat cap against a face: ring of four rim points on the near cap.
        sgn = 1.0 if (nx * ax + ny * ay + nz * az) > 0.0 else -1.0
        ccx = pos[c, 0] - sgn * ax * hh
        ccy = pos[c, 1] - sgn * ay * hh
        ccz = pos[c, 2] - sgn * az * hh
        ux, uy, uz, vx, vy, vz = _perp_basis(ax, ay, az)
        for j in range(4):
            if j == 0:
                rx = ccx + r * ux
                ry = ccy + r * uy
                rz = ccz + r * uz
            elif j == 1:
                rx = ccx - r * ux
                ry = ccy - r * uy
                rz = ccz - r * uz
            elif j == 2:
                rx = ccx + r * vx
                ry = ccy + r * vy
                rz = ccz + r * vz
            else:
                rx = ccx - r * vx
                ry = ccy - r * vy
                rz = ccz - r * vz
            sepj = nx * rx + ny * ry + nz * rz - plane_b
            if sepj < margin and _lateral_ok(pos, rot, dims, b, rx, ry, rz, nx, ny, nz, pad):
                m = _emit(c_a, c_b, c_p, c_n, c_sep, m, c, b, rx, ry, rz, nx, ny, nz, sepj)
    elif align < 0.3:
        # Side against a face: line contact through both cap-edge probes.
        for e in range(2):
            s_ = seg if e == 0 else -seg
            ex = pos[c, 0] + ax * s_
            ey = pos[c, 1] + ay * s_
            ez = pos[c, 2] + az * s_
            sepj = nx * ex + ny * ey + nz * ez - plane_b - r
            sx = ex - nx * r
            sy = ey - ny * r
            sz = ez - nz * r
            if sepj < margin and _lateral_ok(pos, rot, dims, b, sx, sy, sz, nx, ny, nz, pad):
                m = _emit(c_a, c_b, c_p, c_n, c_sep, m, c, b, sx, sy, sz, nx, ny, nz, sepj)
    if m == m0:
        # Oblique (or all probes rejected): single contact at the closest pair.
        wx, wy, wz = _mat_vec(Rb, ptx, pty, ptz)
        sx = pos[b, 0] + wx - nx * r
        sy = pos[b, 1] + wy - ny * r
        sz = pos[b, 2] + wz - nz * r
        m = _emit(c_a, c_b, c_p, c_n, c_sep, m, c, b, sx, sy, sz, nx, ny, nz, sep)
    return m


@njit(cache=True)
def _collide_cyl_cyl(pos, rot, dims, a, b, margin, c_a, c_b, c_p, c_n, c_sep, m):
    """Capsule-capsule: closest points between the two axis segments."""
    Ra = rot[a]
    a1x = Ra[2]
    a1y = Ra[5]
    a1z = Ra[8]
    Rb = rot[b]
    a2x = Rb[2]
    a2y = Rb[5]
    a2z = Rb[8]
    l1 = dims[a, 2]
    l2 = dims[b, 2]
    p1x = pos[a, 0]
    p1y = pos[a, 1]
    p1z = pos[a, 2]
    p2x = pos[b, 0]
    p2y = pos[b, 1]
    p2z = pos[b, 2]
    # Closest points between segments (clamped, Ericson-style).
    rx = p1x - p2x
    ry = p1y - p2y
    rz = p1z - p2z
    A = 1.0
    e = 1.0
    f = a2x * rx + a2y * ry + a2z * rz
    cdot = a1x * rx + a1y * ry + a1z * rz
    bdot = a1x * a2x + a1y * a2y + a1z * a2z
    denom = A * e - bdot * bdot
    if denom > 1e-12:
        s = min(max((bdot * f - cdot * e) / denom, -l1), l1)
    else:
        s = 0.0
    t = bdot * s + f
    if t > l2:
        t = l2
        s = min(max(bdot * t - cdot, -l1), l1)
    elif t < -l2:
        t = -l2
        s = min(max(bdot * t - cdot, -l1), l1)
    q1x = p1x + a1x * s
    q1y = p1y + a1y * s
    q1z = p1z + a1z * s
    q2x = p2x + a2x * t
    q2y = p2y + a2y * t
    q2z = p2z + a2z * t
    dx = q1x - q2x
    dy = q1y - q2y
    dz = q1z - q2z
    d = math.sqrt(dx * dx + dy * dy + dz * dz)
    r1 = dims[a, 0]
    r2 = dims[b, 0]
    sep = d - r1 - r2
    if sep > margin:
        return m
    if d > 1e-12:
        nx = dx / d
        ny = dy / d
        nz = dz / d
    else:
        nx = 0.0
        ny = 0.0
        nz = 1.0
    px = q1x - nx * r1
    py = q1y - ny * r1
    pz = q1z - nz * r1
    m = _emit(c_a, c_b, c_p, c_n, c_sep, m, a, b, px, py, pz, nx, ny, nz, sep)
    if abs(bdot) > 0.95:
        # Near-parallel: probe a's cap points against b's segment for a line contact.
        for e_ in range(2):
            s_ = l1 if e_ == 0 else -l1
            ex = p1x + a1x * s_
            ey = p1y + a1y * s_
            ez = p1z + a1z * s_
            qx, qy, qz = _closest_on_segment(p2x, p2y, p2z, a2x, a2y, a2z, l2, ex, ey, ez)
            ddx = ex - qx
            ddy = ey - qy
            ddz = ez - qz
            dd = math.sqrt(ddx * ddx + ddy * ddy + ddz * ddz)
            sepj = dd - r1 - r2
            if sepj < margin and dd > 1e-12:
                njx = ddx / dd
                njy = ddy / dd
                njz = ddz / dd
                m = _emit(
                    c_a,
                    c_b,
                    c_p,
                    c_n,
                    c_sep,
                    m,
                    a,
                    b,
                    ex - njx * r1,
                    ey - njy * r1,
                    ez - njz * r1,
                    njx,
                    njy,
                    njz,
                    sepj,
                )
    return m


@njit(cache=True)
def gen_contacts(
    kind,
    dims,
    pos,
    rot,
    vel,
    omega,
    brad,
    active,
    inv_mass,
    dt,
    slop,
    extra_margin,
    pad,
    verts,
    c_a,
    c_b,
    c_p,
    c_n,
    c_sep,
):
    """Generate contacts for every proximate pair. Returns the contact count."""
    n = pos.shape[0]
    m = 0
    for i in range(n):
        if active[i] == 0:
            continue
        for j in range(i + 1, n):
            if active[j] == 0:
                continue
            if inv_mass[i] == 0.0 and inv_mass[j] == 0.0:
                continue
            si = math.sqrt(
                vel[i, 0] ** 2 + vel[i, 1] ** 2 + vel[i, 2] ** 2
            ) + brad[i] * math.sqrt(omega[i, 0] ** 2 + omega[i, 1] ** 2 + omega[i, 2] ** 2)
            sj = math.sqrt(
                vel[j, 0] ** 2 + vel[j, 1] ** 2 + vel[j, 2] ** 2
            ) + brad[j] * math.sqrt(omega[j, 0] ** 2 + omega[j, 1] ** 2 + omega[j, 2] ** 2)
            margin = 4.0 * slop + dt * (si + sj) + extra_margin
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            dz = pos[i, 2] - pos[j, 2]
            if math.sqrt(dx * dx + dy * dy + dz * dz) > brad[i] + brad[j] + margin:
                continue
            ki = kind[i]
            kj = kind[j]
            if ki == BOX and kj == BOX:
                m = _collide_box_box(
                    pos, rot, dims, i, j, margin, pad, verts, c_a, c_b, c_p, c_n, c_sep, m
                )
            elif ki == SPHERE and kj == SPHERE:
                m = _collide_sphere_sphere(pos, dims, i, j, margin, c_a, c_b, c_p, c_n, c_sep, m)
            elif ki == SPHERE and kj == BOX:
                m = _collide_sphere_box(pos, rot, dims, i, j, margin, c_a, c_b, c_p, c_n, c_sep, m)
            elif ki == BOX and kj == SPHERE:
                m = _collide_sphere_box(pos, rot, dims, j, i, margin, c_a, c_b, c_p, c_n, c_sep, m)
            elif ki == CYLINDER and kj == BOX:
                m = _collide_cyl_box(
                    pos, rot, dims, i, j, margin, pad, c_a, c_b, c_p, c_n, c_sep, m
                )
            elif ki == BOX and kj == CYLINDER:
                m = _collide_cyl_box(
                    pos, rot, dims, j, i, margin, pad, c_a, c_b, c_p, c_n, c_sep, m
                )
            elif ki == SPHERE and kj == CYLINDER:
                m = _collide_sphere_cyl(pos, rot, dims, i, j, margin, c_a, c_b, c_p, c_n, c_sep, m)
            elif ki == CYLINDER and kj == SPHERE:
                m = _collide_sphere_cyl(pos, rot, dims, j, i, margin, c_a, c_b, c_p, c_n, c_sep, m)
            else:
                m = _collide_cyl_cyl(pos, rot, dims, i, j, margin, c_a, c_b, c_p, c_n, c_sep, m)
    return m


@njit(cache=True)
def _kinetic_energy(pos, rot, vel, omega, mass, ib, inv_mass, active):
    ke = 0.0
    for i in range(pos.shape[0]):
        if active[i] == 0 or inv_mass[i] == 0.0:
            continue
        ke += 0.5 * mass[i] * (vel[i, 0] ** 2 + vel[i, 1] ** 2 + vel[i, 2] ** 2)
        bx, by, bz = _mat_tvec(rot[i], omega[i, 0], omega[i, 1], omega[i, 2])
        ke += 0.5 * (ib[i, 0] * bx * bx + ib[i, 1] * by * by + ib[i, 2] * bz * bz)
    return ke


@njit(cache=True)
def _total_energy(pos, rot, vel, omega, mass, ib, inv_mass, active, gravity):
    e = _kinetic_energy(pos, rot, vel, omega, mass, ib, inv_mass, active)
    for i in range(pos.shape[0]):
        if active[i] == 0 or inv_mass[i] == 0.0:
            continue
        e += mass[i] * gravity * pos[i, 2]
    return e


@njit(cache=True)
def run_steps(
    n_steps,
    dt,
    gravity,
    kind,
    dims,
    mass,
    inv_mass,
    ib,
    ibinv,
    brad,
    active,
    pos,
    rot,
    vel,
    omega,
    mu_table,
    mu_obj,
    restitution,
    rest_threshold,
    slop,
    n_iters,
    kappa,
    max_corr,
    pad,
    sleep_vel,
    record,
    out_pos,
    out_rot,
    log_events,
    prev_contact,
    ev_t,
    ev_a,
    ev_b,
    ev_imp,
    n_events_in,
    t0,
    energy_out,
):
    """Advance the world n_steps. Returns (status, n_events); status 0 means ok,
    k+1 means the state went non-finite during step k."""
    n = pos.shape[0]
    maxc = MAX_CONTACTS
    c_a = np.empty(maxc, dtype=np.int64)
    c_b = np.empty(maxc, dtype=np.int64)
    c_p = np.empty((maxc, 3), dtype=np.float64)
    c_n = np.empty((maxc, 3), dtype=np.float64)
    c_sep = np.empty(maxc, dtype=np.float64)
    c_t1 = np.empty((maxc, 3), dtype=np.float64)
    c_t2 = np.empty((maxc, 3), dtype=np.float64)
    c_kn = np.empty(maxc, dtype=np.float64)
    c_kt1 = np.empty(maxc, dtype=np.float64)
    c_kt2 = np.empty(maxc, dtype=np.float64)
    c_tgt = np.empty(maxc, dtype=np.float64)
    c_mu = np.empty(maxc, dtype=np.float64)
    lam_n = np.empty(maxc, dtype=np.float64)
    lam_t1 = np.empty(maxc, dtype=np.float64)
    lam_t2 = np.empty(maxc, dtype=np.float64)
    verts = np.empty((8, 3), dtype=np.float64)
    pair_imp = np.zeros((n, n), dtype=np.float64)
    now_contact = np.zeros((n, n), dtype=np.uint8)
    supported = np.zeros(n, dtype=np.uint8)
    n_events = n_events_in

    for step in range(n_steps):
        e_start = _total_energy(pos, rot, vel, omega, mass, ib, inv_mass, active, gravity)

        # Gravity kick.
        for i in range(n):
            if active[i] == 1 and inv_mass[i] > 0.0:
                vel[i, 2] -= gravity * dt

        m = gen_contacts(
            kind, dims, pos, rot, vel, omega, brad, active, inv_mass,
            dt, slop, 0.0, pad, verts, c_a, c_b, c_p, c_n, c_sep,
        )

        # Bodies touching a contact are "supported": they integrate without the
        # half-gravity-step position term, which makes rest (zero velocity,
        # zero position drift) an exact, energy-neutral fixed point. Airborne
        # bodies keep the exact-ballistic Verlet update.
        for i in range(n):
            supported[i] = 0
        for c in range(m):
            if c_sep[c] <= slop:
                supported[c_a[c]] = 1
                supported[c_b[c]] = 1

        # Contact prep.
        for c in range(m):
            a = c_a[c]
            b = c_b[c]
            nx = c_n[c, 0]
            ny = c_n[c, 1]
            nz = c_n[c, 2]
            t1x, t1y, t1z, t2x, t2y, t2z = _perp_basis(nx, ny, nz)
            c_t1[c, 0] = t1x
            c_t1[c, 1] = t1y
            c_t1[c, 2] = t1z
            c_t2[c, 0] = t2x
            c_t2[c, 1] = t2y
            c_t2[c, 2] = t2z
            rax = c_p[c, 0] - pos[a, 0]
            ray = c_p[c, 1] - pos[a, 1]
            raz = c_p[c, 2] - pos[a, 2]
            rbx = c_p[c, 0] - pos[b, 0]
            rby = c_p[c, 1] - pos[b, 1]
            rbz = c_p[c, 2] - pos[b, 2]
            # Effective masses along n, t1, t2.
            for axis in range(3):
                if axis == 0:
                    ux = nx
                    uy = ny
                    uz = nz
                elif axis == 1:
                    ux = t1x
                    uy = t1y
                    uz = t1z
                else:
                    ux = t2x
                    uy = t2y
                    uz = t2z
                k_eff = inv_mass[a] + inv_mass[b]
                # a side
                cx = ray * uz - raz * uy
                cy = raz * ux - rax * uz
                cz = rax * uy - ray * ux
                if inv_mass[a] > 0.0:
                    wx, wy, wz = _apply_inv_inertia(rot[a], ibinv[a], cx, cy, cz)
                    k_eff += (wy * raz - wz * ray) * ux + (wz * rax - wx * raz) * uy + (
                        wx * ray - wy * rax
                    ) * uz
                # b side
                cx = rby * uz - rbz * uy
                cy = rbz * ux - rbx * uz
                cz = rbx * uy - rby * ux
                if inv_mass[b] > 0.0:
                    wx, wy, wz = _apply_inv_inertia(rot[b], ibinv[b], cx, cy, cz)
                    k_eff += (wy * rbz - wz * rby) * ux + (wz * rbx - wx * rbz) * uy + (
                        wx * rby - wy * rbx
                    ) * uz
                if axis == 0:
                    c_kn[c] = k_eff
                elif axis == 1:
                    c_kt1[c] = k_eff
                else:
                    c_kt2[c] = k_eff
            # Relative normal velocity at contact (a relative to b).
            vax = vel[a, 0] + omega[a, 1] * raz - omega[a, 2] * ray
            vay = vel[a, 1] + omega[a, 2] * rax - omega[a, 0] * raz
            vaz = vel[a, 2] + omega[a, 0] * ray - omega[a, 1] * rax
            vbx = vel[b, 0] + omega[b, 1] * rbz - omega[b, 2] * rby
            vby = vel[b, 1] + omega[b, 2] * rbx - omega[b, 0] * rbz
            vbz = vel[b, 2] + omega[b, 0] * rby - omega[b, 1] * rbx
            vn0 = (vax - vbx) * nx + (vay - vby) * ny + (vaz - vbz) * nz
            # Airborne bodies move an extra 0.5*g*dt^2 from the Verlet update;
            # fold that into the allowed approach speed so "land exactly on
            # the surface" is the fixed point of the step map.
            a_rel_n = 0.0
            if inv_mass[a] > 0.0 and supported[a] == 0:
                a_rel_n -= gravity * nz
            if inv_mass[b] > 0.0 and supported[b] == 0:
                a_rel_n += gravity * nz
            allow = -max(c_sep[c], 0.0) / dt + 0.5 * a_rel_n * dt
            if vn0 < -rest_threshold:
                bounce = -restitution * vn0
                c_tgt[c] = bounce if bounce > allow else allow
            else:
                c_tgt[c] = allow
            c_mu[c] = mu_table if (a == 0 or b == 0) else mu_obj
            lam_n[c] = 0.0
            lam_t1[c] = 0.0
            lam_t2[c] = 0.0

        # Sequential impulse iterations.
        for _ in range(n_iters):
            for c in range(m):
                a = c_a[c]
                b = c_b[c]
                nx = c_n[c, 0]
                ny = c_n[c, 1]
                nz = c_n[c, 2]
                rax = c_p[c, 0] - pos[a, 0]
                ray = c_p[c, 1] - pos[a, 1]
                raz = c_p[c, 2] - pos[a, 2]
                rbx = c_p[c, 0] - pos[b, 0]
                rby = c_p[c, 1] - pos[b, 1]
                rbz = c_p[c, 2] - pos[b, 2]
                vax = vel[a, 0] + omega[a, 1] * raz - omega[a, 2] * ray
                vay = vel[a, 1] + omega[a, 2] * rax - omega[a, 0] * raz
                vaz = vel[a, 2] + omega[a, 0] * ray - omega[a, 1] * rax
                vbx = vel[b, 0] + omega[b, 1] * rbz - omega[b, 2] * rby
                vby = vel[b, 1] + omega[b, 2] * rbx - omega[b, 0] * rbz
                vbz = vel[b, 2] + omega[b, 0] * rby - omega[b, 1] * rbx
                rvx = vax - vbx
                rvy = vay - vby
                rvz = vaz - vbz
                vn = rvx * nx + rvy * ny + rvz * nz
                dlam = (c_tgt[c] - vn) / c_kn[c]
                new_lam = lam_n[c] + dlam
                if new_lam < 0.0:
                    new_lam = 0.0
                dlam = new_lam - lam_n[c]
                lam_n[c] = new_lam
                if dlam != 0.0:
                    jx = dlam * nx
                    jy = dlam * ny
                    jz = dlam * nz
                    if inv_mass[a] > 0.0:
                        vel[a, 0] += jx * inv_mass[a]
                        vel[a, 1] += jy * inv_mass[a]
                        vel[a, 2] += jz * inv_mass[a]
                        tx = ray * jz - raz * jy
                        ty = raz * jx - rax * jz
                        tz = rax * jy - ray * jx
                        wx, wy, wz = _apply_inv_inertia(rot[a], ibinv[a], tx, ty, tz)
                        omega[a, 0] += wx
                        omega[a, 1] += wy
                        omega[a, 2] += wz
                    if inv_mass[b] > 0.0:
                        vel[b, 0] -= jx * inv_mass[b]
                        vel[b, 1] -= jy * inv_mass[b]
                        vel[b, 2] -= jz * inv_mass[b]
                        tx = rby * jz - rbz * jy
                        ty = rbz * jx - rbx * jz
                        tz = rbx * jy - rby * jx
                        wx, wy, wz = _apply_inv_inertia(rot[b], ibinv[b], tx, ty, tz)
                        omega[b, 0] -= wx
                        omega[b, 1] -= wy
                        omega[b, 2] -= wz

                # Friction along the two tangents, clamped to the cone.
                if lam_n[c] > 0.0:
                    vax = vel[a, 0] + omega[a, 1] * raz - omega[a, 2] * ray
                    vay = vel[a, 1] + omega[a, 2] * rax - omega[a, 0] * raz
                    vaz = vel[a, 2] + omega[a, 0] * ray - omega[a, 1] * rax
                    vbx = vel[b, 0] + omega[b, 1] * rbz - omega[b, 2] * rby
                    vby = vel[b, 1] + omega[b, 2] * rbx - omega[b, 0] * rbz
                    vbz = vel[b, 2] + omega[b, 0] * rby - omega[b, 1] * rbx
                    rvx = vax - vbx
                    rvy = vay - vby
                    rvz = vaz - vbz
                    vt1 = rvx * c_t1[c, 0] + rvy * c_t1[c, 1] + rvz * c_t1[c, 2]
                    vt2 = rvx * c_t2[c, 0] + rvy * c_t2[c, 1] + rvz * c_t2[c, 2]
                    nl1 = lam_t1[c] - vt1 / c_kt1[c]
                    nl2 = lam_t2[c] - vt2 / c_kt2[c]
                    cap = c_mu[c] * lam_n[c]
                    norm = math.sqrt(nl1 * nl1 + nl2 * nl2)
                    if norm > cap:
                        scale = cap / norm
                        nl1 *= scale
                        nl2 *= scale
                    d1 = nl1 - lam_t1[c]
                    d2 = nl2 - lam_t2[c]
                    lam_t1[c] = nl1
                    lam_t2[c] = nl2
                    if d1 != 0.0 or d2 != 0.0:
                        jx = d1 * c_t1[c, 0] + d2 * c_t2[c, 0]
                        jy = d1 * c_t1[c, 1] + d2 * c_t2[c, 1]
                        jz = d1 * c_t1[c, 2] + d2 * c_t2[c, 2]
                        if inv_mass[a] > 0.0:
                            vel[a, 0] += jx * inv_mass[a]
                            vel[a, 1] += jy * inv_mass[a]
                            vel[a, 2] += jz * inv_mass[a]
                            tx = ray * jz - raz * jy
                            ty = raz * jx - rax * jz
                            tz = rax * jy - ray * jx
                            wx, wy, wz = _apply_inv_inertia(rot[a], ibinv[a], tx, ty, tz)
                            omega[a, 0] += wx
                            omega[a, 1] += wy
                            omega[a, 2] += wz
                        if inv_mass[b] > 0.0:
                            vel[b, 0] -= jx * inv_mass[b]
                            vel[b, 1] -= jy * inv_mass[b]
                            vel[b, 2] -= jz * inv_mass[b]
                            tx = rby * jz - rbz * jy
                            ty = rbz * jx - rbx * jz
                            tz = rbx * jy - rby * jx
                            wx, wy, wz = _apply_inv_inertia(rot[b], ibinv[b], tx, ty, tz)
                            omega[b, 0] -= wx
                            omega[b, 1] -= wy
                            omega[b, 2] -= wz

        # Velocity deadband: supported bodies moving below perception scale
        # snap to exact rest before integrating (static friction regime), so
        # untouched objects have bit-constant trajectories, not micro-creep.
        for i in range(n):
            if active[i] == 0 or inv_mass[i] == 0.0 or supported[i] == 0:
                continue
            sp = math.sqrt(
                vel[i, 0] ** 2 + vel[i, 1] ** 2 + vel[i, 2] ** 2
            ) + brad[i] * math.sqrt(
                omega[i, 0] ** 2 + omega[i, 1] ** 2 + omega[i, 2] ** 2
            )
            if sp < sleep_vel:
                for k in range(3):
                    vel[i, k] = 0.0
                    omega[i, k] = 0.0

        # Integrate positions. Airborne bodies use the velocity Verlet update,
        # which is exact under constant gravity; supported bodies drop the
        # half-gravity term so rest is drift-free.
        half_g_dt2 = 0.5 * gravity * dt * dt
        for i in range(n):
            if active[i] == 0 or inv_mass[i] == 0.0:
                continue
            pos[i, 0] += vel[i, 0] * dt
            pos[i, 1] += vel[i, 1] * dt
            pos[i, 2] += vel[i, 2] * dt
            if supported[i] == 0:
                pos[i, 2] += half_g_dt2
            _rodrigues_inplace(rot[i], omega[i, 0], omega[i, 1], omega[i, 2], dt)

        # Energy clamp: if solver-iteration residue pumped the step above its
        # starting energy, bleed the excess out of the kinetic term. Keeps
        # "energy never increases" exact instead of convergence-dependent.
        e_mid = _total_energy(pos, rot, vel, omega, mass, ib, inv_mass, active, gravity)
        if e_mid > e_start:
            ke_mid = _kinetic_energy(pos, rot, vel, omega, mass, ib, inv_mass, active)
            excess = e_mid - e_start
            if ke_mid > excess > 0.0:
                scale = math.sqrt((ke_mid - excess) / ke_mid)
                for i in range(n):
                    if active[i] == 1 and inv_mass[i] > 0.0:
                        for k in range(3):
                            vel[i, k] *= scale
                            omega[i, k] *= scale
                e_mid = e_start

        # Positional projection of residual penetration, budgeted so the
        # potential energy it adds never exceeds a fraction of what this step
        # dissipated: a step can therefore never increase total energy.
        budget = kappa * (e_start - e_mid)
        if budget < 0.0:
            budget = 0.0
        for c in range(m):
            if c_sep[c] >= -slop:
                continue
            a = c_a[c]
            b = c_b[c]
            depth = -c_sep[c] - slop
            if depth > max_corr:
                depth = max_corr
            wsum = inv_mass[a] + inv_mass[b]
            if wsum == 0.0:
                continue
            da = depth * inv_mass[a] / wsum
            db = depth * inv_mass[b] / wsum
            nz = c_n[c, 2]
            dpe = 0.0
            if inv_mass[a] > 0.0:
                dpe += mass[a] * gravity * da * nz
            if inv_mass[b] > 0.0:
                dpe -= mass[b] * gravity * db * nz
            scale = 1.0
            if dpe > 0.0:
                if dpe > budget:
                    scale = budget / dpe
                    budget = 0.0
                else:
                    budget -= dpe
            if scale > 0.0:
                pos[a, 0] += c_n[c, 0] * da * scale
                pos[a, 1] += c_n[c, 1] * da * scale
                pos[a, 2] += c_n[c, 2] * da * scale
                pos[b, 0] -= c_n[c, 0] * db * scale
                pos[b, 1] -= c_n[c, 1] * db * scale
                pos[b, 2] -= c_n[c, 2] * db * scale

        # Divergence check.
        for i in range(n):
            if active[i] == 0 or inv_mass[i] == 0.0:
                continue
            for k in range(3):
                if not math.isfinite(pos[i, k]) or abs(pos[i, k]) > 1e6:
                    return step + 1, n_events

        # Contact onset events.
        if log_events:
            for i in range(n):
                for j in range(n):
                    pair_imp[i, j] = 0.0
                    now_contact[i, j] = 0
            for c in range(m):
                if lam_n[c] > 1e-12:
                    a = c_a[c]
                    b = c_b[c]
                    lo = a if a < b else b
                    hi = b if a < b else a
                    pair_imp[lo, hi] += lam_n[c]
                    now_contact[lo, hi] = 1
            for i in range(n):
                for j in range(i + 1, n):
                    if now_contact[i, j] == 1 and prev_contact[i, j] == 0:
                        if n_events < ev_t.shape[0]:
                            ev_t[n_events] = t0 + step * dt
                            ev_a[n_events] = i
                            ev_b[n_events] = j
                            ev_imp[n_events] = pair_imp[i, j]
                            n_events += 1
                    prev_contact[i, j] = now_contact[i, j]

        if record:
            for i in range(n):
                out_pos[step, i, 0] = pos[i, 0]
                out_pos[step, i, 1] = pos[i, 1]
                out_pos[step, i, 2] = pos[i, 2]
                for k in range(9):
                    out_rot[step, i, k] = rot[i, k]

        if energy_out.shape[0] > 0:
            energy_out[step] = _total_energy(
                pos, rot, vel, omega, mass, ib, inv_mass, active, gravity
            )

    return 0, n_events
