"""From a Reeb graph to a labeled COT.

The Reeb graph of a stable torus Hamiltonian has exactly one cycle, made of
the essential annuli. Cutting one cycle edge along an essential periodic orbit
turns the graph into a tree with two new leaves, ``β·₊`` (the root) and
``β·₋``. The path between them is the essential chain; everything hanging off
it is a binary tree of inessential saddles ending in centers.

Signs: ``+`` means "the neighbouring node lies above the saddle value".
"""

from dataclasses import dataclass

import numpy as np

from . import cotlang as L
from .errors import InternalConsistencyError, TopologyError
from .morse import MAXIMUM, MINIMUM, SADDLE
from .reeb import canonical_winding


@dataclass(frozen=True)
class CutChoice:
    cut_edge: int
    cut_value: float
    winding: tuple
    shift_axis: str
    lower_node: int  # the cycle minimum; β·₊ attaches here
    upper_node: int  # β·₋ attaches here

    def to_dict(self):
        return {
            "cut_edge": self.cut_edge,
            "cut_value": self.cut_value,
            "winding": list(self.winding),
            "shift_axis": self.shift_axis,
            "lower_node": self.lower_node,
            "upper_node": self.upper_node,
        }


def _essential_winding(reeb, node):
    flat = node.pixel[1] * reeb.shape[1] + node.pixel[0]
    for loop in reeb.loops.get(flat, []):
        if loop.essential:
            return canonical_winding(*loop.winding)
    return None


def choose_cut(reeb, field=None):
    """Select the essential periodic orbit along which the torus is cut.

    The saddle ``m`` of lowest value on the Reeb cycle is the lowest saddle whose
    separatrices are essential; its third edge leads down to the sub-level set
    holding the minima. Both cycle edges at ``m`` rise from it, and the cut is
    placed at the midpoint of the one first met when walking from ``m`` across
    its essential separatrix (along ``+y`` when the winding has ``k > 0``,
    along ``+x`` otherwise).
    """
    if reeb.betti != 1:
        raise TopologyError(f"Reeb graph has Betti number {reeb.betti}, expected 1")
    cycle = reeb.cycle_edges()
    if not cycle:
        raise TopologyError("Reeb graph has no cycle")
    cyc_nodes = {reeb.edges[e].a for e in cycle} | {reeb.edges[e].b for e in cycle}
    m = min(cyc_nodes, key=lambda n: (reeb.nodes[n].value, n))
    node = reeb.nodes[m]
    if node.kind != SADDLE:
        raise TopologyError("lowest cycle node is not a saddle")
    winding = _essential_winding(reeb, node)
    if winding is None:
        raise TopologyError(f"saddle at {node.pixel} on the Reeb cycle has no essential separatrix")
    cands = [e for e in cycle if m in (reeb.edges[e].a, reeb.edges[e].b)]
    if len(cands) != 2 or any(reeb.edges[e].a != m for e in cands):
        raise InternalConsistencyError("lowest cycle saddle does not have two rising cycle edges")

    shift_axis = "y" if winding[0] > 0 else "x"
    ny, nx = reeb.shape
    i, j = node.pixel
    cand_regions = {reeb.edges[e].region: e for e in cands}
    chosen = None
    steps = ny if shift_axis == "y" else nx
    for s in range(1, steps):
        if shift_axis == "y":
            r = reeb.labels[(j + s) % ny, i]
        else:
            r = reeb.labels[j, (i + s) % nx]
        if r in cand_regions:
            chosen = cand_regions[r]
            break
    if chosen is None:
        chosen = min(cands, key=lambda e: reeb.edges[e].region)
    edge = reeb.edges[chosen]
    cut_value = 0.5 * (reeb.nodes[edge.a].value + reeb.nodes[edge.b].value)
    return CutChoice(chosen, float(cut_value), winding, shift_axis, edge.a, edge.b)


@dataclass(eq=False)
class RootedTree:
    """The Reeb tree after the cut: adjacency with edge payloads, rooted at β·₊."""

    reeb: object
    cut: CutChoice
    root: int
    beta_minus: int
    values: dict
    kinds: dict
    adj: dict  # node -> list of (neighbour, edge key)
    edge_pixels: dict
    edge_regions: dict

    @property
    def n_nodes(self):
        return len(self.values)

    @property
    def n_edges(self):
        return len(self.edge_pixels)


def cut_and_root(reeb, cut):
    """Split the cut edge into two edges ending at new ``β`` leaves."""
    n = len(reeb.nodes)
    root, bminus = n, n + 1
    values = {nd.id: nd.value for nd in reeb.nodes}
    kinds = {nd.id: nd.kind for nd in reeb.nodes}
    values[root] = values[bminus] = cut.cut_value
    kinds[root], kinds[bminus] = L.BETA_P, L.BETA_M
    adj = {k: [] for k in values}
    edge_pixels, edge_regions = {}, {}
    for e in reeb.edges:
        if e.id == cut.cut_edge:
            continue
        adj[e.a].append((e.b, e.id))
        adj[e.b].append((e.a, e.id))
        edge_pixels[e.id] = reeb.regions[e.region].pixels
        edge_regions[e.id] = (e.region,)
    e = reeb.edges[cut.cut_edge]
    pix = reeb.regions[e.region].pixels
    below = reeb.values.ravel()[pix] < cut.cut_value
    lo_key, hi_key = ("cut", 0), ("cut", 1)
    adj[root].append((e.a, lo_key))
    adj[e.a].append((root, lo_key))
    adj[e.b].append((bminus, hi_key))
    adj[bminus].append((e.b, hi_key))
    edge_pixels[lo_key] = pix[below]
    edge_pixels[hi_key] = pix[~below]
    edge_regions[lo_key] = edge_regions[hi_key] = (e.region,)
    return RootedTree(reeb, cut, root, bminus, values, kinds, adj, edge_pixels, edge_regions)


_CHAIN_SYMBOL = {
    (True, False, True): L.ALPHA_MP,
    (False, True, False): L.ALPHA_PM,
    (False, False, True): L.A_MP,
    (True, True, False): L.A_PM,
    (False, True, True): L.A_PP,
    (True, False, False): L.A_MM,
}


def label_cot(tree):
    """Assign COT symbols by a walk from the root (see module docstring for signs)."""
    values, kinds, adj = tree.values, tree.kinds, tree.adj

    # essential chain: root -> ... -> β·₋
    parent = {tree.root: (None, None)}
    order = [tree.root]
    for u in order:
        for v, key in adj[u]:
            if v not in parent:
                parent[v] = (u, key)
                order.append(v)
    if len(parent) != tree.n_nodes:
        raise InternalConsistencyError("cut Reeb graph is not connected")
    chain = [tree.beta_minus]
    while chain[-1] != tree.root:
        chain.append(parent[chain[-1]][0])
    chain.reverse()

    nx = tree.reeb.shape[1]

    def make(node_id, key, symbol):
        site = None
        if node_id < len(tree.reeb.nodes):
            i, j = tree.reeb.nodes[node_id].pixel
            site = j * nx + i
        return L.CotNode(
            symbol,
            value=float(values[node_id]),
            weight=float(abs(values[node_id] - values[parent[node_id][0]])) if parent[node_id][0] is not None else None,
            regions=tree.edge_regions.get(key, ()),
            pixels=tree.edge_pixels.get(key),
            reeb_node=node_id if node_id < len(tree.reeb.nodes) else None,
            site=site,
        )

    def children_of(u):
        return [(v, key) for v, key in adj[u] if parent[v][0] == u]

    def branch(u, key):
        kind = kinds[u]
        if kind == MAXIMUM:
            return make(u, key, L.SIGMA_P)
        if kind == MINIMUM:
            return make(u, key, L.SIGMA_M)
        kids = children_of(u)
        if kind != SADDLE or len(kids) != 2:
            raise InternalConsistencyError(f"branch node {u} of kind {kind} has {len(kids)} children")
        vu = values[u]
        parent_up = values[parent[u][0]] > vu
        up = [values[v] > vu for v, _ in kids]
        if parent_up and not any(up):
            sym, kids_sorted = L.B_MM, kids
        elif not parent_up and all(up):
            sym, kids_sorted = L.B_PP, kids
        elif up[0] != up[1]:
            minus_first = sorted(kids, key=lambda vk: values[vk[0]] > vu)
            if parent_up:
                sym, kids_sorted = L.B_MP, minus_first
            else:
                sym, kids_sorted = L.B_PM, minus_first[::-1]
        else:
            raise InternalConsistencyError(f"saddle {u} has all three edges on one side")
        node = make(u, key, sym)
        node.children = [branch(v, k) for v, k in kids_sorted]
        return node

    # build the chain from the end so successors exist
    succ = None
    for idx in range(len(chain) - 1, 0, -1):
        u = chain[idx]
        key = parent[u][1]
        if u == tree.beta_minus:
            succ = make(u, key, L.BETA_M)
            continue
        nxt = chain[idx + 1]
        prev = chain[idx - 1]
        off = [(v, k) for v, k in children_of(u) if v != nxt]
        if kinds[u] != SADDLE or len(off) != 1:
            raise InternalConsistencyError(f"chain node {u} is not a saddle with one branch")
        vu = values[u]
        triple = (values[prev] > vu, values[off[0][0]] > vu, values[nxt] > vu)
        sym = _CHAIN_SYMBOL.get(triple)
        if sym is None:
            raise InternalConsistencyError(f"impossible sign triple {triple} at chain saddle {u}")
        node = make(u, key, sym)
        node.children = [branch(*off[0]), succ]
        succ = node
    root = L.CotNode(L.BETA_P, value=float(values[tree.root]), children=[succ])
    if succ.symbol != L.ALPHA_MP:
        raise InternalConsistencyError(f"first chain symbol is {succ.symbol}, expected {L.ALPHA_MP}")
    return L.CotTree(root, tree.cut)


def build_cot(reeb):
    """Choose the cut, root the tree and label it."""
    cut = choose_cut(reeb)
    return label_cot(cut_and_root(reeb, cut))


# ---------------------------------------------------------------------------
# filtering


def _copy(node):
    new = L.CotNode(
        node.symbol, node.value, [], node.weight, tuple(node.regions), node.pixels, node.reeb_node, node.site
    )
    new.children = [_copy(c) for c in node.children]
    return new


def _removable_leaves(root):
    """``(leaf, parent, grandparent)`` for σ leaves whose removal keeps the grammar."""
    out = []
    stack = [(root, None)]
    while stack:
        node, par = stack.pop()
        for idx, child in enumerate(node.children):
            stack.append((child, node))
            if child.symbol not in (L.SIGMA_P, L.SIGMA_M) or node.symbol == L.BETA_P:
                continue
            if par is None:
                continue
            others = [par.value] + [c.value for i, c in enumerate(node.children) if i != idx]
            if len(others) != 2:
                continue
            if (others[0] > node.value) != (others[1] > node.value):
                out.append((child, node, par))
    return out


def _merge_pixels(*arrays):
    parts = [a for a in arrays if a is not None and len(a)]
    if not parts:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(parts)


def filter_cot(cot, eps0):
    """Remove terminal σ edges of weight ``<= eps0``, smallest first.

    A leaf is removed only when its saddle is a pass-through for the remaining
    two edges (one above, one below), so the saddle can be merged away and the
    result stays a valid COT. The merged edge takes the value gap of its new
    endpoints as weight and absorbs the pixels of the removed leaf, both edges
    and the saddle pixel. β nodes are never removed.
    """
    if eps0 < 0:
        raise ValueError("eps0 must be non-negative")
    root = _copy(cot.root)
    while True:
        cands = [
            (leaf.weight, leaf.value, -1 if leaf.reeb_node is None else leaf.reeb_node, leaf, node, par)
            for leaf, node, par in _removable_leaves(root)
            if leaf.weight is not None and leaf.weight <= eps0
        ]
        if not cands:
            break
        _, _, _, leaf, node, par = min(cands, key=lambda c: c[:3])
        keep = next(c for c in node.children if c is not leaf)
        site = None if node.site is None else np.array([node.site], dtype=np.int64)
        keep.pixels = _merge_pixels(keep.pixels, node.pixels, leaf.pixels, site)
        keep.regions = tuple(sorted(set(keep.regions) | set(node.regions) | set(leaf.regions)))
        keep.weight = float(abs(keep.value - par.value))
        slot = next(i for i, c in enumerate(par.children) if c is node)
        par.children[slot] = keep
    return L.CotTree(root, cot.cut)
