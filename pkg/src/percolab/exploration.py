"""The percolation exploration process on a lattice domain.

The interface between the blue cluster attached to the right boundary arc
and the yellow cluster attached to the left arc is grown edge by edge:
at each step the hexagon facing the walk decides the turn (blue ahead,
turn left; yellow ahead, turn right; boundary hexagons carry the fictitious
arc colors).  Colors are lazily drawn from a counter-based source, so a
path is a pure function of (seed, domain, marks).

This module is the readable reference implementation; the Monte Carlo
kernels in _kernels mirror it exactly and are cross-checked by tests.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import (IncompleteColoring, StepBudgetExceeded, TargetUnreachable)
from .hexlattice import (LatticeDomain, edge_flanks, edge_hexes, hexes_at_vertex,
                         split_boundary, vertex_neighbors)

BLUE = 1
YELLOW = -1


class Coloring:
    """Site colors: lazily hashed from a seed, or an explicit assignment.

    Explicit assignments map (q, r) -> +1 (blue) / -1 (yellow).  A queried
    color never changes and never depends on query order.
    """

    def __init__(self, seed=None, assignment=None):
        if seed is None and assignment is None:
            raise ValueError("need a seed or an explicit assignment")
        self.seed = seed
        self.assignment = dict(assignment) if assignment else {}

    def color_of(self, site) -> int:
        c = self.assignment.get(site)
        if c is None:
            if self.seed is None:
                raise IncompleteColoring(f"site {site} has no assigned color")
            c = rng.site_color(self.seed, site[0], site[1])
            self.assignment[site] = c
        return c

    def knows(self, site) -> bool:
        return site in self.assignment or self.seed is not None


@dataclass(frozen=True)
class ExplorationPath:
    """An oriented interface path on lattice edges.

    vertices is the walked vertex sequence (the i-th edge is
    vertices[i] -> vertices[i+1]); the first edge is the off-boundary edge
    entering the start vertex.  explored_blue / explored_yellow are the
    interior sites whose colors the walk queried.
    """

    vertices: tuple
    explored_blue: frozenset
    explored_yellow: frozenset
    start: tuple
    end_state: tuple  # ("target", v) | ("arc", fraction) | ("truncated",)
    a: tuple = None
    b: tuple = None
    arcs: object = None
    mesh: float = 1.0

    @property
    def edges(self):
        return tuple(zip(self.vertices[:-1], self.vertices[1:]))

    @property
    def explored(self):
        return self.explored_blue | self.explored_yellow

    def points(self):
        from .hexlattice import vertex_position
        return np.array([vertex_position(u, v, self.mesh) for u, v in self.vertices])


@dataclass(frozen=True)
class Filling:
    """Explored sites plus the sites the path disconnected from b."""

    hexes: frozenset
    tip: tuple
    components: tuple  # of (frozenset sites, type tag in {1,2,3,4} or None)


class BoundaryArcTarget:
    """Stop when the walk reaches one of these boundary vertices.

    The vertices must be listed in counterclockwise boundary order; the
    reported hit fraction is the continuum arc fraction when the domain
    carries a source shape (projection of the hit vertex), otherwise the
    lattice arc-length fraction.
    """

    def __init__(self, vertices, dom=None, c_name=None, d_name=None):
        self.vertices = tuple(vertices)
        self._set = frozenset(self.vertices)
        self._index = {v: i for i, v in enumerate(self.vertices)}
        self.dom = dom
        self.c_name = c_name
        self.d_name = d_name

    def __contains__(self, v):
        return v in self._set

    def hit_fraction(self, v) -> float:
        if self.dom is not None and self.dom.source is not None and self.c_name:
            z = self.dom.vertex_pos(v)
            return self.dom.source.arc_param(z, self.c_name, self.d_name)
        n = len(self.vertices)
        return self._index[v] / max(1, n - 1)


class CircleTarget:
    """Stop at the first vertex on or beyond a circle around `center`.

    This is the in-place semiball arc: the walk starts inside, and because
    the disc is convex the first vertex outside is reached by the first
    edge crossing the circle.  The reported fraction is the crossing
    angle mapped onto [theta_start, theta_end] (counterclockwise).
    """

    def __init__(self, center, radius, theta_start=0.0, theta_end=math.pi):
        self.center = complex(center)
        self.radius = float(radius)
        self.theta_start = theta_start
        self.theta_end = theta_end

    def is_out(self, pos) -> bool:
        return abs(pos - self.center) >= self.radius

    def hit_fraction(self, p_prev, p_hit) -> float:
        z = circle_crossing(self.center, self.radius, p_prev, p_hit)
        theta = cmath.phase(z - self.center) % (2 * math.pi)
        span = self.theta_end - self.theta_start
        return min(1.0, max(0.0, (theta - self.theta_start) / span))


def circle_crossing(center, radius, p, q) -> complex:
    """First point of segment p->q on the circle |z - center| = radius."""
    p = complex(p) - center
    q = complex(q) - center
    d = q - p
    aa = abs(d) ** 2
    bb = 2.0 * (p.real * d.real + p.imag * d.imag)
    cc = abs(p) ** 2 - radius * radius
    disc = bb * bb - 4.0 * aa * cc
    if disc < 0 or aa == 0:
        return center + q  # endpoint already out (numeric edge case)
    s = (-bb + math.sqrt(disc)) / (2.0 * aa)
    s = min(1.0, max(0.0, s))
    return center + p + s * d


class PolylineTarget:
    """Stop when a walk edge first crosses a continuum polyline."""

    def __init__(self, polyline):
        self.polyline = np.asarray(polyline, dtype=complex)
        seglen = np.abs(np.diff(self.polyline))
        self._cum = np.concatenate([[0.0], np.cumsum(seglen)])

    def crossing(self, p, q):
        """(step_s, arc_fraction) of the first crossing of segment p->q, or None."""
        from .conformal import _segment_intersection
        best = None
        pts = self.polyline
        for i in range(len(pts) - 1):
            hit = _segment_intersection(p, q, pts[i], pts[i + 1])
            if hit is not None:
                frac = (self._cum[i] + hit[1] * (self._cum[i + 1] - self._cum[i]))
                frac /= self._cum[-1]
                if best is None or hit[0] < best[0]:
                    best = (hit[0], frac)
        return best


def _prepare_sides(dom: LatticeDomain, a, b):
    arcs = split_boundary(dom, a, b)
    side = {}
    for h in arcs.right:
        side[h] = BLUE
    for h in arcs.left:
        side[h] = YELLOW
    return arcs, side


def _turn_candidates(tail, head):
    cands = [n for n in vertex_neighbors(*head) if n != tail]
    du, dv = head[0] - tail[0], head[1] - tail[1]
    cross0 = du * (cands[0][1] - head[1]) - dv * (cands[0][0] - head[0])
    if cross0 > 0:
        return cands[0], cands[1]  # (left, right)
    return cands[1], cands[0]


def _front_hexagon(tail, head):
    on_edge = edge_hexes(tail, head)
    for h in hexes_at_vertex(*head):
        if h not in on_edge:
            return h
    raise AssertionError("no front hexagon")


def explore(dom: LatticeDomain, a, b, colors: Coloring,
            target=None) -> ExplorationPath:
    """Run the exploration process from e-vertex a toward e-vertex b.

    With a target, the walk stops at its first contact with the target and
    the end_state carries the hit fraction; reaching b first raises
    TargetUnreachable unless b itself lies on the target.
    """
    arcs, side = _prepare_sides(dom, a, b)
    tail, head = dom.start_edge(a)
    verts = [tail, head]
    explored = {}
    budget = 10 * max(1, len(dom.interior)) + 60
    mesh = dom.mesh

    boundary_target = isinstance(target, BoundaryArcTarget)
    polyline_target = isinstance(target, PolylineTarget)
    circle_target = isinstance(target, CircleTarget)
    end_state = None
    steps = 0
    while True:
        if boundary_target and head in target:
            end_state = ("arc", target.hit_fraction(head))
            break
        if circle_target:
            from .hexlattice import vertex_position
            pos = vertex_position(*head, mesh)
            if target.is_out(pos):
                prev_pos = vertex_position(*tail, mesh)
                end_state = ("arc", target.hit_fraction(prev_pos, pos))
                break
        if head == b:
            if target is None:
                end_state = ("target", b)
                break
            raise TargetUnreachable("endpoint reached before the target arc")
        front = _front_hexagon(tail, head)
        if front in dom.interior:
            c = explored.get(front)
            if c is None:
                c = colors.color_of(front)
                explored[front] = c
        else:
            c = side.get(front)
            if c is None:
                raise AssertionError(f"walk met hexagon {front} outside the domain")
        left, right = _turn_candidates(tail, head)
        nxt = left if c == BLUE else right
        if polyline_target:
            from .hexlattice import vertex_position
            hit = target.crossing(vertex_position(*head, mesh),
                                  vertex_position(*nxt, mesh))
            if hit is not None:
                verts.append(nxt)
                end_state = ("arc", hit[1])
                break
        tail, head = head, nxt
        verts.append(head)
        steps += 1
        if steps > budget:
            raise StepBudgetExceeded(f"no termination within {budget} steps")

    blue = frozenset(s for s, c in explored.items() if c == BLUE)
    yellow = frozenset(s for s, c in explored.items() if c == YELLOW)
    return ExplorationPath(tuple(verts), blue, yellow, a, end_state,
                           a=a, b=b, arcs=arcs, mesh=mesh)


def explore_until_arc(dom: LatticeDomain, a, b, colors: Coloring, target):
    """Exploration stopped at a target arc; returns (path, hit fraction)."""
    if isinstance(target, BoundaryArcTarget) and not target.vertices:
        raise ValueError("target arc is empty")
    path = explore(dom, a, b, colors, target=target)
    if path.end_state[0] != "arc":
        raise TargetUnreachable("walk ended before reaching the target arc")
    return path, path.end_state[1]


def static_interface(dom: LatticeDomain, a, b, coloring: Coloring) -> ExplorationPath:
    """The unique separating interface of a fully colored domain.

    Computed from global cluster structure (independent of the dynamic
    walk): the blue cluster attached to the right arc and the yellow
    cluster attached to the left arc touch exactly along the interface.
    """
    arcs, side = _prepare_sides(dom, a, b)
    for s in dom.interior:
        if not coloring.knows(s):
            raise IncompleteColoring(f"site {s} not colored")
    color = {s: coloring.color_of(s) for s in dom.interior}

    def grow(seeds, want):
        cluster = set(seeds)
        stack = [h for seed in seeds for h in _interior_neighbors(dom, seed)
                 if color.get(h) == want]
        for h in stack:
            cluster.add(h)
        while stack:
            h = stack.pop()
            for n in _interior_neighbors(dom, h):
                if n not in cluster and color.get(n) == want:
                    cluster.add(n)
                    stack.append(n)
        return cluster

    bstar = grow(arcs.right, BLUE)
    ystar = grow(arcs.left, YELLOW)

    contact = set()
    for h in bstar:
        for n in hex_neighbors_cached(h):
            if n in ystar and (h in dom.interior or n in dom.interior):
                va, vb = _shared_corners(h, n)
                contact.add((va, vb) if va <= vb else (vb, va))
    e_a = tuple(sorted(_off_boundary_edge(dom, a)))
    e_b = tuple(sorted(_off_boundary_edge(dom, b)))
    contact.add(e_a)
    contact.discard(e_b)

    incident = {}
    for e in contact:
        for v in e:
            incident.setdefault(v, []).append(e)
    for v, es in incident.items():
        if len(es) > 2:
            raise AssertionError(f"interface branches at {v}")

    verts = list(_off_boundary_edge(dom, a))  # (outside vertex, a)
    used = {e_a}
    cur = a
    while cur != b:
        options = [e for e in incident.get(cur, []) if e not in used]
        if len(options) != 1:
            raise AssertionError(f"interface walk stuck at {cur}")
        e = options[0]
        used.add(e)
        nxt = e[0] if e[1] == cur else e[1]
        verts.append(nxt)
        cur = nxt
    if used != contact:
        raise AssertionError("interface edges left over after the walk")

    blue, yellow = set(), set()
    for i in range(len(verts) - 1):
        rgt, lft = edge_flanks(verts[i], verts[i + 1])
        if rgt in dom.interior:
            blue.add(rgt)
        if lft in dom.interior:
            yellow.add(lft)
    return ExplorationPath(tuple(verts), frozenset(blue), frozenset(yellow),
                           a, ("target", b), a=a, b=b, arcs=arcs, mesh=dom.mesh)


_NEIGHBOR_CACHE = {}


def hex_neighbors_cached(h):
    out = _NEIGHBOR_CACHE.get(h)
    if out is None:
        from .hexlattice import hex_neighbors
        out = hex_neighbors(*h)
        _NEIGHBOR_CACHE[h] = out
    return out


def _interior_neighbors(dom, h):
    return [n for n in hex_neighbors_cached(h) if n in dom.interior]


def _shared_corners(h1, h2):
    from .hexlattice import hex_corner_units
    c1 = set(hex_corner_units(*h1))
    shared = [c for c in hex_corner_units(*h2) if c in c1]
    if len(shared) != 2:
        raise ValueError(f"{h1} and {h2} are not adjacent")
    return shared


def _off_boundary_edge(dom, v):
    tail, head = dom.start_edge(v)
    return (tail, head)


def fill(path: ExplorationPath, dom: LatticeDomain, b) -> Filling:
    """Explored sites plus everything the path cut off from b.

    Residual components (of the unexplored interior) are tagged:
    1 yellow-flank pocket against the left boundary, 2 blue-flank pocket
    against the right boundary, 3 pure yellow-flank, 4 pure blue-flank,
    None when mixed (only possible for the component still holding b on a
    stopped path).
    """
    explored = path.explored
    unexplored = dom.interior - explored
    b_hex = dom.interior_hex_at(b)
    reachable = set()
    if b_hex in unexplored:
        reachable.add(b_hex)
        stack = [b_hex]
        while stack:
            h = stack.pop()
            for n in _interior_neighbors(dom, h):
                if n in unexplored and n not in reachable:
                    reachable.add(n)
                    stack.append(n)
    hexes = frozenset(explored | (unexplored - reachable))

    comps = []
    seen = set()
    right = set(path.arcs.right) if path.arcs else set()
    left = set(path.arcs.left) if path.arcs else set()
    for s in unexplored:
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            h = stack.pop()
            for n in _interior_neighbors(dom, h):
                if n in unexplored and n not in comp:
                    comp.add(n)
                    stack.append(n)
        seen |= comp
        touches_b = touches_y = touches_r = touches_l = False
        for h in comp:
            for n in hex_neighbors_cached(h):
                if n in path.explored_blue:
                    touches_b = True
                elif n in path.explored_yellow:
                    touches_y = True
                elif n in right:
                    touches_r = True
                elif n in left:
                    touches_l = True
        if touches_y and touches_l and not touches_b and not touches_r:
            tag = 1
        elif touches_b and touches_r and not touches_y and not touches_l:
            tag = 2
        elif touches_y and not touches_b and not touches_r and not touches_l:
            tag = 3
        elif touches_b and not touches_y and not touches_r and not touches_l:
            tag = 4
        else:
            tag = None
        comps.append((frozenset(comp), tag))
    return Filling(hexes, path.vertices[-1], tuple(comps))


# ---------------------------------------------------------------------------
# annulus interface-strand counting
# ---------------------------------------------------------------------------

_CANONICAL_DIRS = ((1, 0), (0, 1), (-1, 1))  # E, NE, NW: each edge once


def annulus_arm_count(coloring: Coloring, center, r_inner, r_outer,
                      mesh: float = 1.0, half_plane: bool = False):
    """Interface strands crossing the annulus around `center`.

    A strand is a maximal arc of an interface component running from the
    inner circle to the outer one; the count equals the number of disjoint
    monochromatic crossings of alternating color.  With half_plane=True
    only sites with r >= 0 exist (semi-annulus at the lattice half-plane
    boundary).  Returns (count, pattern) where pattern lists the strand
    flank colors ordered by crossing angle, e.g. "BY".
    """
    from .hexlattice import hex_center, hex_corner_units, vertex_position
    if not 0 < r_inner < r_outer:
        raise ValueError("need 0 < r_inner < r_outer")
    center = complex(center)
    reach = r_outer + 3.1 * mesh
    sites = {}
    r_lo = math.floor((center.imag - reach) / (1.5 * mesh)) - 1
    r_hi = math.ceil((center.imag + reach) / (1.5 * mesh)) + 1
    if half_plane:
        r_lo = max(0, r_lo)
    sqrt3m = math.sqrt(3.0) * mesh
    for r in range(r_lo, r_hi + 1):
        q_lo = math.floor((center.real - reach) / sqrt3m - 0.5 * r) - 1
        q_hi = math.ceil((center.real + reach) / sqrt3m - 0.5 * r) + 1
        for q in range(q_lo, q_hi + 1):
            if abs(hex_center(q, r, mesh) - center) <= reach:
                sites[(q, r)] = coloring.color_of((q, r))

    edges = {}
    incident = {}
    for (q, r), c in sites.items():
        for dq, dr in _CANONICAL_DIRS:
            n = (q + dq, r + dr)
            cn = sites.get(n)
            if cn is None or cn == c:
                continue
            va, vb = _shared_corners((q, r), n)
            key = (va, vb)
            edges[key] = ((q, r), n)
            incident.setdefault(va, []).append(key)
            incident.setdefault(vb, []).append(key)

    def zone(v):
        d = abs(vertex_position(v[0], v[1], mesh) - center)
        if d <= r_inner:
            return -1
        if d >= r_outer:
            return 1
        return 0

    visited = set()
    crossings = []  # (angle, blue_is_ccw)

    def walk(start_edge, start_vertex):
        """Follow the interface from start_vertex; returns vertex list and closure."""
        seq = [start_vertex]
        e = start_edge
        cur = start_vertex
        while True:
            visited.add(e)
            cur = e[0] if e[1] == cur else e[1]
            seq.append(cur)
            nxts = [x for x in incident.get(cur, []) if x != e]
            if not nxts:
                return seq, False
            e = nxts[0]
            if e in visited:
                return seq, True

    for e in list(edges):
        if e in visited:
            continue
        seq_fwd, closed = walk(e, e[0])
        if closed:
            seq = seq_fwd
        else:
            seq_back, _ = walk(e, e[1])
            visited.add(e)
            seq = list(reversed(seq_back)) + seq_fwd[2:]
        zs = [zone(v) for v in seq]
        nz = [(z, i) for i, z in enumerate(zs) if z != 0]
        if closed and nz:
            nz.append(nz[0])
        for (z0, i0), (z1, i1) in zip(nz[:-1], nz[1:]):
            if z0 != z1:
                # read the strand at its inner-circle port, where the edge
                # orientation relative to the center is unambiguous
                if z1 == 1:  # leaving the inner zone, edge points outward
                    j = i0
                    outward = True
                else:  # entering the inner zone, edge points inward
                    j = i1 - 1 if i1 > 0 else len(seq) - 2
                    outward = False
                a_v, b_v = seq[j], seq[j + 1]
                rgt, lft = edge_flanks(a_v, b_v)
                ccw_hex = lft if outward else rgt
                c = sites.get(ccw_hex)
                letter = "B" if c == BLUE else "Y" if c == YELLOW else "?"
                mid = 0.5 * (vertex_position(*a_v, mesh) + vertex_position(*b_v, mesh))
                crossings.append((cmath.phase(mid - center), letter))

    crossings.sort()
    pattern = "".join(c for _, c in crossings)
    return len(crossings), pattern
