"""Grid kernels for the piecewise-linear topology of a periodic scalar field.

The periodic ``ny x nx`` grid is triangulated by splitting every cell along the
diagonal ``(i, j)-(i+1, j+1)``. Vertices are compared through a strict total
order ``rank`` (value first, flat index second), which is the symbolic
perturbation that makes all vertex values distinct.

Indexing
--------
vertex   ``v = j * nx + i``
edge     ``3 * v + d`` with ``d = 0`` horizontal ``(i,j)-(i+1,j)``,
         ``d = 1`` vertical ``(i,j)-(i,j+1)``, ``d = 2`` diagonal ``(i,j)-(i+1,j+1)``
triangle ``2 * v + t`` with ``t = 0``: ``(i,j),(i+1,j),(i+1,j+1)`` and
         ``t = 1``: ``(i,j),(i+1,j+1),(i,j+1)``

Every kernel has an interpreted fallback (see ``_jit``); ``classify_numpy`` is
the vectorized counterpart of ``classify``.
"""

import numpy as np

from ._jit import njit

# link of a vertex in counterclockwise order; consecutive pairs span its 6 triangles
LINK = np.array([[1, 0], [1, 1], [0, 1], [-1, 0], [-1, -1], [0, -1]], dtype=np.int64)

REGULAR = 0
MINIMUM = 1
MAXIMUM = 2
SADDLE = 3
MULTI_SADDLE = 4

TRACE_OK = 0
TRACE_NOT_CLOSED = 1


def vertex_rank(values):
    """Position of each vertex in the (value, flat index) total order."""
    flat = np.ascontiguousarray(values, dtype=np.float64).ravel()
    order = np.lexsort((np.arange(flat.size), flat))
    rank = np.empty(flat.size, dtype=np.int64)
    rank[order] = np.arange(flat.size, dtype=np.int64)
    return rank


# ---------------------------------------------------------------------------
# critical point classification


@njit
def classify(rank, nx, ny):
    """Return ``(kind, lower_components)`` per vertex."""
    n = nx * ny
    kind = np.zeros(n, dtype=np.int8)
    lower = np.zeros(n, dtype=np.int64)
    below = np.zeros(6, dtype=np.bool_)
    for j in range(ny):
        for i in range(nx):
            v = j * nx + i
            r = rank[v]
            nbelow = 0
            for k in range(6):
                w = ((j + LINK[k, 1]) % ny) * nx + (i + LINK[k, 0]) % nx
                below[k] = rank[w] < r
                if below[k]:
                    nbelow += 1
            changes = 0
            for k in range(6):
                if below[k] != below[(k + 1) % 6]:
                    changes += 1
            if changes == 0:
                if nbelow == 0:
                    kind[v] = MINIMUM
                    lower[v] = 0
                else:
                    kind[v] = MAXIMUM
                    lower[v] = 1
            else:
                lower[v] = changes // 2
                if changes == 4:
                    kind[v] = SADDLE
                elif changes >= 6:
                    kind[v] = MULTI_SADDLE
    return kind, lower


def classify_numpy(rank, nx, ny):
    """Vectorized equivalent of :func:`classify`."""
    r = rank.reshape(ny, nx)
    below = np.stack(
        [np.roll(r, (-dy, -dx), axis=(0, 1)) < r for dx, dy in LINK]
    )
    changes = np.sum(below != np.roll(below, -1, axis=0), axis=0)
    nbelow = below.sum(axis=0)
    kind = np.zeros((ny, nx), dtype=np.int8)
    lower = changes // 2
    flat_min = (changes == 0) & (nbelow == 0)
    flat_max = (changes == 0) & (nbelow > 0)
    kind[flat_min] = MINIMUM
    kind[flat_max] = MAXIMUM
    lower[flat_max] = 1
    kind[changes == 4] = SADDLE
    kind[changes >= 6] = MULTI_SADDLE
    return kind.ravel(), lower.ravel().astype(np.int64)


# ---------------------------------------------------------------------------
# geometry helpers


@njit
def _wrap(x, y, nx, ny):
    return (y % ny) * nx + (x % nx)


@njit
def _edge_id(x1, y1, x2, y2, nx, ny):
    """Id of the grid edge between two (unwrapped) adjacent vertices, and its origin."""
    dx = x2 - x1
    dy = y2 - y1
    if dx < 0 or (dx == 0 and dy < 0):
        x1, y1 = x2, y2
        dx = -dx
        dy = -dy
    if dx == 1 and dy == 0:
        d = 0
    elif dx == 0 and dy == 1:
        d = 1
    else:
        d = 2
    return 3 * _wrap(x1, y1, nx, ny) + d, x1, y1, d


@njit
def _third_options(px, py, d):
    """The two vertices completing a triangle on edge ``(px, py, d)``, with triangle kinds."""
    if d == 0:
        return px + 1, py + 1, px, py, 0, px, py - 1, px, py - 1, 1
    if d == 1:
        return px + 1, py + 1, px, py, 1, px - 1, py, px - 1, py, 0
    return px + 1, py, px, py, 0, px, py + 1, px, py, 1


@njit
def _triangle_id(px, py, d, tx, ty, nx, ny):
    ax, ay, acx, acy, ak, bx, by, bcx, bcy, bk = _third_options(px, py, d)
    if ax == tx and ay == ty:
        return 2 * _wrap(acx, acy, nx, ny) + ak
    return 2 * _wrap(bcx, bcy, nx, ny) + bk


# ---------------------------------------------------------------------------
# separatrix tracing


@njit
def _grow_i(a, n):
    if n < a.shape[0]:
        return a
    b = np.empty(max(2 * a.shape[0], n + 16), dtype=np.int64)
    b[: a.shape[0]] = a
    return b


@njit
def _grow_f(a, n):
    if n < a.shape[0]:
        return a
    b = np.empty(max(2 * a.shape[0], n + 16), dtype=np.float64)
    b[: a.shape[0]] = a
    return b


@njit
def trace_all(rank, f, nx, ny, saddles, max_steps):
    """Trace both self-connected separatrix loops of every saddle.

    The loop follows the PL level set through the saddle value; levels are
    compared with ``rank`` so the trace is combinatorially exact.

    Returns ``(status, bad_saddle, loop_saddle, loop_ports, loop_wind,
    loop_ptr, px, py, cross_edge, tri_ptr, tri_id)`` where loop ``L`` owns
    crossing points ``loop_ptr[L]:loop_ptr[L+1]`` (unwrapped coordinates, in
    grid units) and triangles ``tri_ptr[L]:tri_ptr[L+1]``.
    """
    nloops_max = 2 * saddles.shape[0]
    loop_saddle = np.empty(nloops_max, dtype=np.int64)
    loop_ports = np.empty((nloops_max, 2), dtype=np.int64)
    loop_wind = np.empty((nloops_max, 2), dtype=np.int64)
    loop_ptr = np.zeros(nloops_max + 1, dtype=np.int64)
    tri_ptr = np.zeros(nloops_max + 1, dtype=np.int64)
    cap = 1024
    px = np.empty(cap, dtype=np.float64)
    py = np.empty(cap, dtype=np.float64)
    cross_edge = np.empty(cap, dtype=np.int64)
    tri_id = np.empty(cap, dtype=np.int64)
    npts = 0
    ntri = 0
    nloops = 0
    below = np.zeros(6, dtype=np.bool_)
    used = np.zeros(6, dtype=np.bool_)

    for si in range(saddles.shape[0]):
        s = saddles[si]
        sx = s % nx
        sy = s // nx
        rs = rank[s]
        fs = f[s]
        for k in range(6):
            w = _wrap(sx + LINK[k, 0], sy + LINK[k, 1], nx, ny)
            below[k] = rank[w] < rs
            used[k] = False
        for k in range(6):
            k2 = (k + 1) % 6
            if below[k] == below[k2] or used[k]:
                continue
            used[k] = True
            e1x = sx + LINK[k, 0]
            e1y = sy + LINK[k, 1]
            e2x = sx + LINK[k2, 0]
            e2y = sy + LINK[k2, 1]
            cx = sx
            cy = sy
            eid, ox, oy, d = _edge_id(e1x, e1y, e2x, e2y, nx, ny)
            tri_id = _grow_i(tri_id, ntri)
            tri_id[ntri] = _triangle_id(ox, oy, d, cx, cy, nx, ny)
            ntri += 1
            steps = 0
            closed = False
            while steps < max_steps:
                steps += 1
                eid, ox, oy, d = _edge_id(e1x, e1y, e2x, e2y, nx, ny)
                # endpoint below / above the level
                w1 = _wrap(e1x, e1y, nx, ny)
                w2 = _wrap(e2x, e2y, nx, ny)
                if rank[w1] < rs:
                    ax, ay, aw, bx, by, bw = e1x, e1y, w1, e2x, e2y, w2
                else:
                    ax, ay, aw, bx, by, bw = e2x, e2y, w2, e1x, e1y, w1
                df = f[bw] - f[aw]
                t = 0.5
                if df > 0.0:
                    t = (fs - f[aw]) / df
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                px = _grow_f(px, npts)
                py = _grow_f(py, npts)
                cross_edge = _grow_i(cross_edge, npts)
                px[npts] = ax + t * (bx - ax)
                py[npts] = ay + t * (by - ay)
                cross_edge[npts] = eid
                npts += 1
                # step into the triangle on the other side of the edge
                o1x, o1y, _a, _b, _c, o2x, o2y, _d, _e, _f = _third_options(ox, oy, d)
                if o1x == cx and o1y == cy:
                    tx, ty = o2x, o2y
                else:
                    tx, ty = o1x, o1y
                tri_id = _grow_i(tri_id, ntri)
                tri_id[ntri] = _triangle_id(ox, oy, d, tx, ty, nx, ny)
                ntri += 1
                tw = _wrap(tx, ty, nx, ny)
                if tw == s:
                    # back at the saddle: find the arrival port
                    d1x = e1x - tx
                    d1y = e1y - ty
                    d2x = e2x - tx
                    d2y = e2y - ty
                    port = -1
                    for kk in range(6):
                        kk2 = (kk + 1) % 6
                        if (
                            (LINK[kk, 0] == d1x and LINK[kk, 1] == d1y and LINK[kk2, 0] == d2x and LINK[kk2, 1] == d2y)
                            or (LINK[kk, 0] == d2x and LINK[kk, 1] == d2y and LINK[kk2, 0] == d1x and LINK[kk2, 1] == d1y)
                        ):
                            port = kk
                    used[port] = True
                    loop_saddle[nloops] = s
                    loop_ports[nloops, 0] = k
                    loop_ports[nloops, 1] = port
                    loop_wind[nloops, 0] = (tx - sx) // nx
                    loop_wind[nloops, 1] = (ty - sy) // ny
                    nloops += 1
                    loop_ptr[nloops] = npts
                    tri_ptr[nloops] = ntri
                    closed = True
                    break
                if rank[tw] > rs:
                    e1x, e1y, e2x, e2y = ax, ay, tx, ty
                    cx, cy = bx, by
                else:
                    e1x, e1y, e2x, e2y = tx, ty, bx, by
                    cx, cy = ax, ay
            if not closed:
                return (
                    TRACE_NOT_CLOSED, s, loop_saddle[:nloops], loop_ports[:nloops], loop_wind[:nloops],
                    loop_ptr[: nloops + 1], px[:npts], py[:npts], cross_edge[:npts],
                    tri_ptr[: nloops + 1], tri_id[:ntri],
                )
    return (
        TRACE_OK, -1, loop_saddle[:nloops], loop_ports[:nloops], loop_wind[:nloops],
        loop_ptr[: nloops + 1], px[:npts], py[:npts], cross_edge[:npts],
        tri_ptr[: nloops + 1], tri_id[:ntri],
    )


# ---------------------------------------------------------------------------
# region segmentation


@njit
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit
def _union(parent, size, x, y):
    rx = _find(parent, x)
    ry = _find(parent, y)
    if rx == ry:
        return
    if size[rx] < size[ry]:
        rx, ry = ry, rx
    parent[ry] = rx
    size[rx] += size[ry]


@njit
def _triangle_vertices(t, nx, ny):
    cell = t // 2
    i = cell % nx
    j = cell // nx
    if t % 2 == 0:
        return i, j, i + 1, j, i + 1, j + 1
    return i, j, i + 1, j + 1, i, j + 1


@njit
def segment(rank, nx, ny, edge_ptr, edge_level, tri_ptr, tri_level, tri_saddle):
    """Label the complement of the critical contours.

    Each grid edge is split into intervals by the contour crossings on it
    (``edge_ptr``/``edge_level`` hold, per edge, the crossing levels as ranks in
    ascending order). Triangle pieces between consecutive contour levels glue
    the intervals they touch. Returns ``(status, node_region, vertex_region,
    bound_region, bound_saddle, bound_side, nregions)``; ``bound_side`` is 0
    when the saddle bounds the region from below and 1 from above.
    """
    n = nx * ny
    ne = 3 * n
    node_off = np.empty(ne + 1, dtype=np.int64)
    node_off[0] = 0
    for e in range(ne):
        node_off[e + 1] = node_off[e] + (edge_ptr[e + 1] - edge_ptr[e]) + 1
    nnodes = node_off[ne]
    parent = np.arange(nnodes)
    size = np.ones(nnodes, dtype=np.int64)
    status = 0

    nb = 0
    cap = 64 + 2 * tri_level.shape[0]
    b_node = np.empty(cap, dtype=np.int64)
    b_saddle = np.empty(cap, dtype=np.int64)
    b_side = np.empty(cap, dtype=np.int64)

    for t in range(2 * n):
        x0, y0, x1, y1, x2, y2 = _triangle_vertices(t, nx, ny)
        vx = np.array([x0, x1, x2])
        vy = np.array([y0, y1, y2])
        vr = np.array([rank[_wrap(x0, y0, nx, ny)], rank[_wrap(x1, y1, nx, ny)], rank[_wrap(x2, y2, nx, ny)]])
        order = np.argsort(vr)
        a = order[0]
        b = order[1]
        c = order[2]
        e_ab, _, _, _ = _edge_id(vx[a], vy[a], vx[b], vy[b], nx, ny)
        e_bc, _, _, _ = _edge_id(vx[b], vy[b], vx[c], vy[c], nx, ny)
        e_ac, _, _, _ = _edge_id(vx[a], vy[a], vx[c], vy[c], nx, ny)
        lo = tri_ptr[t]
        m = tri_ptr[t + 1] - lo
        rb = vr[b]
        p = 0
        hasb = 0
        for q in range(m):
            lv = tri_level[lo + q]
            if lv < rb:
                p += 1
            elif lv == rb:
                hasb = 1
        r = p + hasb
        if edge_ptr[e_ac + 1] - edge_ptr[e_ac] != m:
            status = 1
        if edge_ptr[e_ab + 1] - edge_ptr[e_ab] != p:
            status = 1
        if edge_ptr[e_bc + 1] - edge_ptr[e_bc] != m - r:
            status = 1
        if status != 0:
            continue
        for k in range(m + 1):
            root = node_off[e_ac] + k
            if k <= p:
                _union(parent, size, root, node_off[e_ab] + k)
            if k >= r:
                _union(parent, size, root, node_off[e_bc] + k - r)
            if k >= 1:
                b_node = _grow_i(b_node, nb)
                b_saddle = _grow_i(b_saddle, nb)
                b_side = _grow_i(b_side, nb)
                b_node[nb] = root
                b_saddle[nb] = tri_saddle[lo + k - 1]
                b_side[nb] = 0
                nb += 1
            if k < m:
                b_node = _grow_i(b_node, nb)
                b_saddle = _grow_i(b_saddle, nb)
                b_side = _grow_i(b_side, nb)
                b_node[nb] = root
                b_saddle[nb] = tri_saddle[lo + k]
                b_side[nb] = 1
                nb += 1

    # compact region ids in order of first appearance
    label = -np.ones(nnodes, dtype=np.int64)
    node_region = np.empty(nnodes, dtype=np.int64)
    nregions = 0
    for x in range(nnodes):
        rt = _find(parent, x)
        if label[rt] < 0:
            label[rt] = nregions
            nregions += 1
        node_region[x] = label[rt]

    vertex_region = -np.ones(n, dtype=np.int64)
    for v in range(n):
        i = v % nx
        j = v // nx
        e = 3 * v
        w = _wrap(i + 1, j, nx, ny)
        if rank[v] < rank[w]:
            vertex_region[v] = node_region[node_off[e]]
        else:
            vertex_region[v] = node_region[node_off[e + 1] - 1]

    bound_region = np.empty(nb, dtype=np.int64)
    for q in range(nb):
        bound_region[q] = node_region[b_node[q]]
    return status, node_region, vertex_region, bound_region, b_saddle[:nb], b_side[:nb], nregions
