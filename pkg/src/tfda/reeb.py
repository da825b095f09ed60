"""Reeb graph of a structurally stable Hamiltonian on the flat torus.

The level set through every saddle is traced exactly on the PL triangulation
(two loops per saddle). Cutting the torus along all of these critical contours
leaves a set of open annuli and punctured disks, each of which is swept by
regular level curves and becomes one edge of the Reeb graph. The graph is a
multigraph: two annuli can join the same pair of saddles.
"""

import json
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateFieldError, InternalConsistencyError, TopologyError, TracingError
from .morse import MAXIMUM, MINIMUM, SADDLE, check_stability, classify_vertices


def canonical_winding(k, l):
    """Representative of ``+-(k, l)`` with ``k > 0`` or ``k == 0, l >= 0``."""
    if k < 0 or (k == 0 and l < 0):
        return -k, -l
    return k, l


def winding_of(polyline, nx, ny):
    """Winding ``(k, l)`` of a closed, coordinate-unwrapped polyline in grid units."""
    pts = np.asarray(polyline, dtype=float)
    d = pts[-1] - pts[0]
    k, l = d[0] / nx, d[1] / ny
    if abs(k - round(k)) > 1e-9 or abs(l - round(l)) > 1e-9:
        raise ValueError("polyline does not close on the torus")
    return int(round(k)), int(round(l))


@dataclass(frozen=True, eq=False)
class SeparatrixLoop:
    """One of the two closed level curves through a saddle.

    ``polyline`` holds unwrapped grid coordinates ``(x, y)`` starting and ending
    at the saddle pixel; ``winding`` is the signed displacement in periods.
    """

    saddle: object
    polyline: np.ndarray
    winding: tuple
    ports: tuple = (-1, -1)

    @property
    def essential(self):
        return self.winding != (0, 0)

    def reversed(self):
        k, l = self.winding
        return SeparatrixLoop(self.saddle, self.polyline[::-1].copy(), (-k, -l), self.ports[::-1])


@dataclass(eq=False)
class Region:
    id: int
    pixels: np.ndarray  # flat pixel indices j * nx + i
    value_range: tuple
    lower_node: int
    upper_node: int
    boundary_saddles: tuple
    essential: bool = False

    @property
    def kind(self):
        return "annulus_essential" if self.essential else "annulus_inessential"

    def pixel_set(self, nx):
        return {(int(p % nx), int(p // nx)) for p in self.pixels}


@dataclass(frozen=True)
class ReebNode:
    id: int
    kind: str
    value: float
    pixel: tuple
    point: object = None


@dataclass(frozen=True)
class ReebEdge:
    id: int
    a: int  # lower endpoint
    b: int  # upper endpoint
    region: int
    weight: float


@dataclass(eq=False)
class ReebGraph:
    nodes: list
    edges: list
    regions: list
    loops: dict = field(default_factory=dict)
    labels: np.ndarray = None  # per-pixel region id, -1 on saddle pixels
    shape: tuple = None
    values: np.ndarray = None  # the field values the graph was built from

    def degree(self, node_id):
        return sum((e.a == node_id) + (e.b == node_id) for e in self.edges)

    def degrees(self):
        deg = np.zeros(len(self.nodes), dtype=int)
        for e in self.edges:
            deg[e.a] += 1
            deg[e.b] += 1
        return deg

    @property
    def betti(self):
        return len(self.edges) - len(self.nodes) + self.n_components()

    def n_components(self):
        parent = list(range(len(self.nodes)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            parent[find(e.a)] = find(e.b)
        return len({find(i) for i in range(len(self.nodes))})

    def incident(self, node_id):
        return [e for e in self.edges if e.a == node_id or e.b == node_id]

    def cycle_edges(self):
        """Ids of the edges on the unique cycle, found by repeatedly stripping leaves."""
        deg = self.degrees()
        alive = np.ones(len(self.edges), dtype=bool)
        inc = defaultdict(list)
        for e in self.edges:
            inc[e.a].append(e.id)
            inc[e.b].append(e.id)
        stack = [n for n in range(len(self.nodes)) if deg[n] == 1]
        while stack:
            n = stack.pop()
            for eid in inc[n]:
                if alive[eid]:
                    alive[eid] = False
                    e = self.edges[eid]
                    other = e.b if e.a == n else e.a
                    deg[n] -= 1
                    deg[other] -= 1
                    if deg[other] == 1:
                        stack.append(other)
        return [e.id for e in self.edges if alive[e.id]]

    def to_dict(self):
        return {
            "nodes": [
                {"id": n.id, "kind": n.kind, "value": n.value, "pixel": list(n.pixel)} for n in self.nodes
            ],
            "edges": [
                {
                    "id": e.id,
                    "a": e.a,
                    "b": e.b,
                    "weight": e.weight,
                    "essential": self.regions[e.region].essential,
                    "area_pixels": int(self.regions[e.region].pixels.size),
                }
                for e in self.edges
            ],
            "betti": self.betti,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_dot(self):
        lines = ["graph reeb {"]
        shapes = {MINIMUM: "invtriangle", MAXIMUM: "triangle", SADDLE: "diamond"}
        for n in self.nodes:
            lines.append(f'  n{n.id} [label="{n.kind[:3]} {n.value:.4g}", shape={shapes.get(n.kind, "ellipse")}];')
        for e in self.edges:
            style = "bold" if self.regions[e.region].essential else "solid"
            lines.append(f'  n{e.a} -- n{e.b} [label="{e.weight:.3g}", style={style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(eq=False)
class _Trace:
    """Raw output of the tracing kernel for all saddles of a field."""

    saddles: np.ndarray
    loop_saddle: np.ndarray
    loop_ports: np.ndarray
    loop_wind: np.ndarray
    loop_ptr: np.ndarray
    px: np.ndarray
    py: np.ndarray
    cross_edge: np.ndarray
    tri_ptr: np.ndarray
    tri_id: np.ndarray


def _run_trace(field, rank, saddle_flat):
    f = field.values.ravel()
    max_steps = 4 * field.nx * field.ny
    out = _kernels.trace_all(rank, f, field.nx, field.ny, np.asarray(saddle_flat, dtype=np.int64), max_steps)
    status, bad = out[0], out[1]
    if status != _kernels.TRACE_OK:
        i, j = int(bad % field.nx), int(bad // field.nx)
        raise TracingError(f"level set through saddle at pixel ({i}, {j}) did not close within {max_steps} steps")
    return _Trace(np.asarray(saddle_flat, dtype=np.int64), *out[2:])


def _loops_from_trace(trace, points_by_flat, nx, ny):
    loops = defaultdict(list)
    for L in range(trace.loop_saddle.size):
        s = int(trace.loop_saddle[L])
        sx, sy = s % nx, s // nx
        lo, hi = trace.loop_ptr[L], trace.loop_ptr[L + 1]
        k, l = int(trace.loop_wind[L, 0]), int(trace.loop_wind[L, 1])
        poly = np.empty((hi - lo + 2, 2))
        poly[0] = (sx, sy)
        poly[1:-1, 0] = trace.px[lo:hi]
        poly[1:-1, 1] = trace.py[lo:hi]
        poly[-1] = (sx + k * nx, sy + l * ny)
        loops[s].append(
            SeparatrixLoop(points_by_flat[s], poly, (k, l), (int(trace.loop_ports[L, 0]), int(trace.loop_ports[L, 1])))
        )
    return loops


def trace_separatrices(field, saddle):
    """The two separatrix loops through ``saddle`` (a :class:`CriticalPoint`)."""
    rank, _, _ = classify_vertices(field)
    s = saddle.flat_index(field.nx)
    trace = _run_trace(field, rank, [s])
    loops = _loops_from_trace(trace, {s: saddle}, field.nx, field.ny)[s]
    if len(loops) != 2:
        raise InternalConsistencyError(f"saddle at {saddle.pixel} produced {len(loops)} loops")
    return loops[0], loops[1]


def _csr(keys, levels, saddles, size):
    """Group ``(levels, saddles)`` by ``keys`` into CSR form sorted by level."""
    order = np.lexsort((levels, keys))
    keys, levels, saddles = keys[order], levels[order], saddles[order]
    if keys.size > 1:
        dup = (np.diff(keys) == 0) & (np.diff(levels) == 0)
        keep = np.concatenate([[True], ~dup])
        keys, levels, saddles = keys[keep], levels[keep], saddles[keep]
    ptr = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=size), out=ptr[1:])
    return ptr, levels.astype(np.int64), saddles.astype(np.int64)


def build_reeb_graph(field, points=None):
    """Build the Reeb graph; raises unless the field is structurally stable with Betti 1."""
    if points is None:
        points, report = check_stability(field)
        if not report.stable:
            raise DegenerateFieldError("field is not structurally stable: " + "; ".join(report.reasons))

    nx, ny, n = field.nx, field.ny, field.nx * field.ny
    rank, _, _ = classify_vertices(field)
    points = sorted(points, key=lambda p: p.flat_index(nx))
    by_flat = {p.flat_index(nx): p for p in points}
    saddle_flat = np.array([p.flat_index(nx) for p in points if p.kind == SADDLE], dtype=np.int64)

    trace = _run_trace(field, rank, saddle_flat)
    loops = _loops_from_trace(trace, by_flat, nx, ny)

    pts_per_loop = np.diff(trace.loop_ptr)
    tri_per_loop = np.diff(trace.tri_ptr)
    cross_saddle = np.repeat(trace.loop_saddle, pts_per_loop)
    tri_saddle = np.repeat(trace.loop_saddle, tri_per_loop)
    edge_ptr, edge_level, _ = _csr(trace.cross_edge, rank[cross_saddle], cross_saddle, 3 * n)
    tri_ptr, tri_level, tri_sad = _csr(trace.tri_id, rank[tri_saddle], tri_saddle, 2 * n)

    status, _, vertex_region, b_region, b_saddle, b_side, nregions = _kernels.segment(
        rank, nx, ny, edge_ptr, edge_level, tri_ptr, tri_level, tri_sad
    )
    if status != 0:
        raise InternalConsistencyError("contour crossings are inconsistent with the triangulation")
    vertex_region = vertex_region.copy()
    vertex_region[saddle_flat] = -1

    node_of = {p.flat_index(nx): i for i, p in enumerate(points)}
    nodes = [ReebNode(i, p.kind, p.value, p.pixel, p) for i, p in enumerate(points)]

    lower = [set() for _ in range(nregions)]
    upper = [set() for _ in range(nregions)]
    for r, s, side in zip(b_region, b_saddle, b_side):
        (lower if side == 0 else upper)[r].add(node_of[int(s)])
    for p in points:
        if p.kind == SADDLE:
            continue
        r = vertex_region[p.flat_index(nx)]
        (lower if p.kind == MINIMUM else upper)[r].add(node_of[p.flat_index(nx)])

    order = np.argsort(vertex_region, kind="stable")
    counts = np.bincount(vertex_region[vertex_region >= 0], minlength=nregions)
    starts = np.concatenate([[0], np.cumsum(counts)])
    skip = np.count_nonzero(vertex_region < 0)

    regions, edges = [], []
    for r in range(nregions):
        if len(lower[r]) != 1 or len(upper[r]) != 1:
            raise InternalConsistencyError(
                f"region {r} has {len(lower[r])} lower and {len(upper[r])} upper boundary nodes"
            )
        a, b = next(iter(lower[r])), next(iter(upper[r]))
        pix = np.sort(order[skip + starts[r] : skip + starts[r + 1]])
        sad = tuple(x for x in (a, b) if nodes[x].kind == SADDLE)
        regions.append(Region(r, pix, (nodes[a].value, nodes[b].value), a, b, sad))
        edges.append(ReebEdge(r, a, b, r, abs(nodes[b].value - nodes[a].value)))

    graph = ReebGraph(nodes, edges, regions, dict(loops), vertex_region.reshape(ny, nx), (ny, nx), field.values)
    _check_graph(graph)
    for eid in graph.cycle_edges():
        regions[edges[eid].region].essential = True
    return graph


def _check_graph(graph):
    if len(graph.edges) != len(graph.nodes) or graph.n_components() != 1:
        raise TopologyError(
            f"field not a structurally stable torus Hamiltonian: {len(graph.nodes)} nodes, "
            f"{len(graph.edges)} edges, {graph.n_components()} component(s)"
        )
    deg = graph.degrees()
    for node in graph.nodes:
        want = 3 if node.kind == SADDLE else 1
        if deg[node.id] != want:
            raise TopologyError(f"{node.kind} at {node.pixel} has degree {deg[node.id]}")


def segment_regions(field):
    """Regions of the complement of all critical contours (see :func:`build_reeb_graph`)."""
    return build_reeb_graph(field).regions
