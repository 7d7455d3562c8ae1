"""Triangular-lattice geometry at mesh delta.

Sites are hexagonal cells of a pointy-top hexagon tiling, addressed by
integer axial coordinates (q, r); the mesh (hexagon circumradius) lives on
the domain, never on the site, so all adjacency arithmetic is exact.

Center formula:  center(q, r) = (sqrt(3) * delta * (q + r/2),  1.5 * delta * r).
Two sites are adjacent iff their centers are at distance sqrt(3) * delta.

Hexagon corners live on the dual honeycomb; a corner is addressed by an
integer pair (u, v) with real position (sqrt(3)/2 * delta * u, 0.5 * delta * v).
The center of (q, r) sits at (u, v) = (2q + r, 3r) and its six corners at
offsets (0, 2), (1, 1), (1, -1), (0, -2), (-1, -1), (-1, 1) from there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conformal import MarkedDomain
from .errors import MeshTooCoarse, SameVertex

SQRT3 = math.sqrt(3.0)

# axial neighbor offsets: E, NE, NW, W, SW, SE
NEIGHBOR_OFFSETS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))

# corner offsets in honeycomb units, clockwise from the top corner
CORNER_OFFSETS = ((0, 2), (1, 1), (1, -1), (0, -2), (-1, -1), (-1, 1))

# boundary edge (from_corner, to_corner) per neighbor direction, oriented so
# the owning hexagon lies on the left (counterclockwise boundary traversal)
_EDGE_BY_DIR = {
    (1, 0): (2, 1),
    (0, 1): (1, 0),
    (-1, 1): (0, 5),
    (-1, 0): (5, 4),
    (0, -1): (4, 3),
    (1, -1): (3, 2),
}


def hex_center(q: int, r: int, mesh: float) -> complex:
    return complex(SQRT3 * mesh * (q + 0.5 * r), 1.5 * mesh * r)


def hex_neighbors(q: int, r: int):
    return [(q + dq, r + dr) for dq, dr in NEIGHBOR_OFFSETS]


def hex_corner_units(q: int, r: int):
    """The six corner vertices of hexagon (q, r) in honeycomb units."""
    cu, cv = 2 * q + r, 3 * r
    return [(cu + du, cv + dv) for du, dv in CORNER_OFFSETS]


def vertex_position(u: int, v: int, mesh: float) -> complex:
    return complex(0.5 * SQRT3 * mesh * u, 0.5 * mesh * v)


def vertex_neighbors(u: int, v: int):
    """The three honeycomb neighbors of a lattice vertex."""
    if v % 3 == 2:  # 'up' vertex: apex above, two below
        return [(u, v + 2), (u + 1, v - 1), (u - 1, v - 1)]
    if v % 3 == 1:
        return [(u, v - 2), (u + 1, v + 1), (u - 1, v + 1)]
    raise ValueError(f"({u}, {v}) is not a honeycomb vertex")


def hexes_at_vertex(u: int, v: int):
    """The three hexagons sharing a lattice vertex."""
    if v % 3 == 2:
        r0 = (v - 2) // 3
        q0 = (u - r0) // 2
        return [(q0, r0), (q0, r0 + 1), (q0 - 1, r0 + 1)]
    if v % 3 == 1:
        r0 = (v + 2) // 3
        q0 = (u - r0) // 2
        return [(q0, r0), (q0, r0 - 1), (q0 + 1, r0 - 1)]
    raise ValueError(f"({u}, {v}) is not a honeycomb vertex")


def edge_hexes(a, b):
    """The two hexagons flanking the honeycomb edge a-b."""
    ha = hexes_at_vertex(*a)
    hb = hexes_at_vertex(*b)
    return [h for h in ha if h in hb]


def edge_flanks(a, b):
    """(right_hex, left_hex) of the directed edge a -> b."""
    du, dv = b[0] - a[0], b[1] - a[1]
    pair = edge_hexes(a, b)
    out_r, out_l = None, None
    for q, r in pair:
        cu, cv = 2 * q + r, 3 * r
        # cross(d, 2*center - (a+b)) in honeycomb units; sign matches the
        # real-plane cross product
        cross = du * (2 * cv - a[1] - b[1]) - dv * (2 * cu - a[0] - b[0])
        if cross < 0:
            out_r = (q, r)
        else:
            out_l = (q, r)
    return out_r, out_l


class LatticeDomain:
    """A Jordan set of hexagons at mesh delta with its boundary data.

    Immutable after construction.  The site boundary (s_loop) is the
    cyclically ordered loop of exterior hexagons adjacent to the interior;
    boundary_vertices/boundary_edges trace the topological boundary polygon
    counterclockwise; e_vertices are the boundary vertices whose
    off-boundary edge belongs to exterior hexagons only (exactly one
    interior hexagon at the vertex).
    """

    def __init__(self, mesh, interior, boundary_vertices, boundary_edges,
                 s_loop, e_vertices, marked=None, source=None):
        self.mesh = float(mesh)
        self.interior = frozenset(interior)
        self.boundary_vertices = tuple(boundary_vertices)
        self.boundary_edges = tuple(boundary_edges)
        self.s_loop = tuple(s_loop)
        self.e_vertices = tuple(e_vertices)
        self.marked = dict(marked or {})
        self.source = source
        self._vertex_index = {v: i for i, v in enumerate(self.boundary_vertices)}
        self._e_set = frozenset(self.e_vertices)

    def __len__(self):
        return len(self.interior)

    def vertex_pos(self, v) -> complex:
        return vertex_position(v[0], v[1], self.mesh)

    def center(self, site) -> complex:
        return hex_center(site[0], site[1], self.mesh)

    def is_e_vertex(self, v) -> bool:
        return v in self._e_set

    def interior_hex_at(self, v):
        """The unique interior hexagon at an e-vertex."""
        hexes = [h for h in hexes_at_vertex(*v) if h in self.interior]
        if len(hexes) != 1:
            raise ValueError(f"{v} is not an e-vertex")
        return hexes[0]

    def start_edge(self, v):
        """The off-boundary edge at an e-vertex, oriented toward it."""
        hx = self.interior_hex_at(v)
        for n in vertex_neighbors(*v):
            if hx not in hexes_at_vertex(*n):
                return (n, v)
        raise AssertionError("e-vertex without an exterior edge")

    def boundary_index(self, v) -> int:
        return self._vertex_index[v]

    def qr_box(self):
        qs = [q for q, _ in self.interior] + [q for q, _ in self.s_loop]
        rs = [r for _, r in self.interior] + [r for _, r in self.s_loop]
        return min(qs), max(qs), min(rs), max(rs)


def _largest_component(sites: set) -> set:
    best = set()
    remaining = set(sites)
    while remaining:
        seed = next(iter(remaining))
        comp = {seed}
        stack = [seed]
        while stack:
            q, r = stack.pop()
            for n in hex_neighbors(q, r):
                if n in remaining and n not in comp:
                    comp.add(n)
                    stack.append(n)
        remaining -= comp
        if len(comp) > len(best):
            best = comp
    return best


def _fill_holes(sites: set) -> set:
    """Add bounded complement components (holes) to the site set."""
    if not sites:
        return sites
    qs = [q for q, _ in sites]
    rs = [r for _, r in sites]
    q0, q1 = min(qs) - 1, max(qs) + 1
    r0, r1 = min(rs) - 1, max(rs) + 1
    outside = set()
    stack = [(q0, r0)]
    outside.add((q0, r0))
    while stack:
        q, r = stack.pop()
        for nq, nr in hex_neighbors(q, r):
            if q0 <= nq <= q1 and r0 <= nr <= r1:
                if (nq, nr) not in sites and (nq, nr) not in outside:
                    outside.add((nq, nr))
                    stack.append((nq, nr))
    filled = set(sites)
    for q in range(q0, q1 + 1):
        for r in range(r0, r1 + 1):
            if (q, r) not in filled and (q, r) not in outside:
                filled.add((q, r))
    return filled


def _trace_boundary(interior: set):
    """Counterclockwise boundary polygon of a simply connected hexagon set.

    Returns (vertices, edges, exterior_loop) where exterior_loop is the
    ordered list of exterior hexagons across the boundary edges,
    consecutive duplicates collapsed.
    """
    out_edge = {}
    exterior_of = {}
    for q, r in interior:
        corners = hex_corner_units(q, r)
        for dq, dr in NEIGHBOR_OFFSETS:
            n = (q + dq, r + dr)
            if n in interior:
                continue
            ci, cj = _EDGE_BY_DIR[(dq, dr)]
            a, b = corners[ci], corners[cj]
            if a in out_edge:
                raise MeshTooCoarse("boundary polygon is not simple")
            out_edge[a] = b
            exterior_of[(a, b)] = n
    if not out_edge:
        raise MeshTooCoarse("empty interior")
    start = next(iter(out_edge))
    verts = [start]
    edges = []
    loop = []
    cur = start
    for _ in range(len(out_edge)):
        nxt = out_edge[cur]
        edges.append((cur, nxt))
        loop.append(exterior_of[(cur, nxt)])
        cur = nxt
        if cur == start:
            break
        verts.append(cur)
    if cur != start or len(edges) != len(out_edge):
        raise MeshTooCoarse("boundary has several components (set not simply connected)")
    # collapse consecutive duplicates in the exterior loop (cyclically)
    s_loop = []
    for h in loop:
        if not s_loop or s_loop[-1] != h:
            s_loop.append(h)
    while len(s_loop) > 1 and s_loop[0] == s_loop[-1]:
        s_loop.pop()
    return verts, edges, s_loop


def _e_vertices_of(interior: set, boundary_vertices):
    evs = []
    for v in boundary_vertices:
        k = sum(1 for h in hexes_at_vertex(*v) if h in interior)
        if k == 1:
            evs.append(v)
    return evs


def validate_jordan(interior: set):
    """Raise MeshTooCoarse unless the set is a Jordan set (s-boundary a T-loop)."""
    verts, edges, s_loop = _trace_boundary(interior)
    if len(set(s_loop)) != len(s_loop):
        raise MeshTooCoarse("s-boundary repeats a hexagon (not a T-loop)")
    first, last = s_loop[0], s_loop[-1]
    if len(s_loop) > 1 and last not in hex_neighbors(*first):
        raise MeshTooCoarse("s-boundary loop does not close")
    return verts, edges, s_loop


def build_rhombus(n: int, mesh: float = 1.0) -> LatticeDomain:
    """The n-by-n axial rhombus {0 <= q < n, 0 <= r < n}."""
    interior = {(q, r) for q in range(n) for r in range(n)}
    verts, edges, s_loop = validate_jordan(interior)
    evs = _e_vertices_of(interior, verts)
    return LatticeDomain(mesh, interior, verts, edges, s_loop, evs)


def build_from_sites(interior, mesh: float = 1.0, marked=None) -> LatticeDomain:
    """LatticeDomain from an explicit site set (validated, no pruning)."""
    interior = set(interior)
    verts, edges, s_loop = validate_jordan(interior)
    evs = _e_vertices_of(interior, verts)
    return LatticeDomain(mesh, interior, verts, edges, s_loop, evs, marked=marked)


def build_delta_approximation(domain: MarkedDomain, mesh: float) -> LatticeDomain:
    """Lattice approximation of a catalogue domain at the given mesh.

    Interior = hexagons whose center lies in the domain, restricted to the
    largest connected component with holes filled; marked boundary points
    are snapped to nearest e-vertices.  Raises MeshTooCoarse when the mesh
    cannot support the domain or its marks.
    """
    if mesh <= 0:
        raise ValueError("mesh must be positive")
    feature = domain.min_feature_size()
    if mesh > feature / 2.0:
        raise MeshTooCoarse(f"mesh {mesh} exceeds half the feature size {feature}")
    sites = _candidate_sites(domain, mesh)
    if not sites:
        raise MeshTooCoarse("no hexagon center falls inside the domain")
    sites = _fill_holes(_largest_component(sites))

    for _ in range(4):
        verts, edges, s_loop = _trace_boundary(sites)
        repeats = {h for h in s_loop if s_loop.count(h) > 1}
        if not repeats:
            break
        # prune the interior hexagons pinching the repeated exterior hexagon
        removed = False
        for h in repeats:
            for n in hex_neighbors(*h):
                if n in sites:
                    sites.discard(n)
                    removed = True
        if not removed:
            raise MeshTooCoarse("cannot prune to a T-loop")
        sites = _fill_holes(_largest_component(sites))
    else:
        raise MeshTooCoarse("pruning did not reach a T-loop")

    if len(set(s_loop)) != len(s_loop):
        raise MeshTooCoarse("s-boundary repeats a hexagon (not a T-loop)")
    evs = _e_vertices_of(sites, verts)
    if not evs:
        raise MeshTooCoarse("domain has no e-vertices")

    marked = {}
    if domain.marks:
        ev_pos = np.array([vertex_position(u, v, mesh) for u, v in evs])
        for name in domain.marks:
            target = domain.mark_point(name)
            order = np.argsort(np.abs(ev_pos - target))
            best = evs[int(order[0])]
            marked[name] = best
            if abs(ev_pos[int(order[0])] - target) > 2.0 * mesh:
                raise MeshTooCoarse(f"mark {name!r} snaps farther than 2 mesh")
        snapped = list(marked.values())
        if len(set(snapped)) != len(snapped):
            raise MeshTooCoarse("two marks snapped to the same e-vertex")
        pos = {m: vertex_position(v[0], v[1], mesh) for m, v in marked.items()}
        names = list(pos)
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                if abs(pos[names[i]] - pos[names[j]]) < 4.0 * mesh:
                    raise MeshTooCoarse(
                        f"marks {names[i]!r} and {names[j]!r} closer than 4 mesh"
                    )
    return LatticeDomain(mesh, sites, verts, edges, s_loop, evs,
                         marked=marked, source=domain)


def _candidate_sites(domain: MarkedDomain, mesh: float) -> set:
    # bounding box of the domain boundary with one hexagon of margin
    ts = np.linspace(0.0, 1.0, 512, endpoint=False)
    pts = np.array([domain.boundary_point(t) for t in ts])
    xmin, xmax = pts.real.min() - 2 * mesh, pts.real.max() + 2 * mesh
    ymin, ymax = pts.imag.min() - 2 * mesh, pts.imag.max() + 2 * mesh
    r_lo = math.floor(ymin / (1.5 * mesh)) - 1
    r_hi = math.ceil(ymax / (1.5 * mesh)) + 1
    out = set()
    for r in range(r_lo, r_hi + 1):
        q_lo = math.floor(xmin / (SQRT3 * mesh) - 0.5 * r) - 1
        q_hi = math.ceil(xmax / (SQRT3 * mesh) - 0.5 * r) + 1
        for q in range(q_lo, q_hi + 1):
            if domain.contains(hex_center(q, r, mesh)):
                out.add((q, r))
    return out


@dataclass(frozen=True)
class BoundaryArcs:
    """The boundary split at two e-vertices x, y.

    right: exterior hexagons adjacent to the counterclockwise arc x -> y;
    left: the remainder; rightEdges/leftEdges: the corresponding directed
    boundary edge arcs.  Hexagons touching both arcs are assigned to the
    arc that first reaches them counterclockwise from x.
    """

    right: tuple
    left: tuple
    right_edges: tuple
    left_edges: tuple


def boundary_loop(dom: LatticeDomain):
    """The cyclically ordered external site boundary of the domain."""
    return dom.s_loop


def split_boundary(dom: LatticeDomain, x, y) -> BoundaryArcs:
    """Split the boundary at e-vertices x (start) and y (end).

    The right arc runs counterclockwise from x to y; the left arc is the
    remaining (clockwise from x) part.
    """
    if x == y:
        raise SameVertex("cannot split the boundary at a single vertex")
    if not (dom.is_e_vertex(x) and dom.is_e_vertex(y)):
        raise ValueError("split points must be e-vertices")
    n = len(dom.boundary_vertices)
    ix, iy = dom.boundary_index(x), dom.boundary_index(y)
    idx_right = [(ix + k) % n for k in range((iy - ix) % n)]
    idx_left = [(iy + k) % n for k in range((ix - iy) % n)]
    r_edges = tuple(dom.boundary_edges[i] for i in idx_right)
    l_edges = tuple(dom.boundary_edges[i] for i in idx_left)

    right, seen = [], set()
    for e in r_edges:
        h = _exterior_across(dom, e)
        if h not in seen:
            seen.add(h)
            right.append(h)
    left = []
    for e in l_edges:
        h = _exterior_across(dom, e)
        if h not in seen:
            seen.add(h)
            left.append(h)
    return BoundaryArcs(tuple(right), tuple(left), r_edges, l_edges)


def _exterior_across(dom: LatticeDomain, edge):
    for h in edge_hexes(*edge):
        if h not in dom.interior:
            return h
    raise AssertionError("boundary edge without exterior hexagon")


def export_json(dom: LatticeDomain) -> dict:
    """JSON-ready dict of sites, boundary loop, and e-vertices (debugging)."""
    return {
        "mesh": dom.mesh,
        "interior": sorted(dom.interior),
        "s_boundary": list(dom.s_loop),
        "e_vertices": list(dom.e_vertices),
        "marked": {k: list(v) for k, v in dom.marked.items()},
    }
