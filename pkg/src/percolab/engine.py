"""Bridges between domain objects and the compiled Monte Carlo kernels.

Each setup function bakes a LatticeDomain (or annulus geometry) into flat
arrays once; the run functions then dispatch thousands of independent
samples through numba.  Per-sample seeds come from rng.derive_seed, so
estimates are pure functions of (configuration, root seed).
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels, rng
from .errors import StepBudgetExceeded
from .exploration import BoundaryArcTarget, CircleTarget, circle_crossing
from .hexlattice import (LatticeDomain, hex_corner_units, hex_neighbors,
                         split_boundary, vertex_position)


class WalkSetup:
    """Grid encoding of one (domain, a, b) exploration problem."""

    def __init__(self, dom: LatticeDomain, a, b):
        self.dom = dom
        self.a = a
        self.b = b
        q0, q1, r0, r1 = dom.qr_box()
        self.q0, self.r0 = q0, r0
        state = np.zeros((q1 - q0 + 1, r1 - r0 + 1), dtype=np.int8)
        for q, r in dom.interior:
            state[q - q0, r - r0] = 1
        arcs = split_boundary(dom, a, b)
        for q, r in arcs.right:
            state[q - q0, r - r0] = 2
        for q, r in arcs.left:
            state[q - q0, r - r0] = 3
        self.arcs = arcs
        self.state = state
        (self.tail, self.head) = dom.start_edge(a)
        self.budget = 10 * max(1, len(dom.interior)) + 60
        self.max_path = self.budget + 8
        # default target: none
        self.mode = 0
        self.flags = np.zeros((1, 1), dtype=np.uint8)
        self.fu0 = self.fv0 = 0
        self.ccx = self.ccy = self.crad = 0.0
        self.target = None

    def with_boundary_target(self, target: BoundaryArcTarget):
        us = [u for u, _ in target.vertices]
        vs = [v for _, v in target.vertices]
        self.fu0, self.fv0 = min(us), min(vs)
        flags = np.zeros((max(us) - self.fu0 + 1, max(vs) - self.fv0 + 1),
                         dtype=np.uint8)
        for u, v in target.vertices:
            flags[u - self.fu0, v - self.fv0] = 1
        self.flags = flags
        self.mode = 1
        self.target = target
        return self

    def with_circle_target(self, target: CircleTarget):
        self.ccx = target.center.real
        self.ccy = target.center.imag
        self.crad = target.radius
        self.mode = 2
        self.target = target
        return self


def run_hitting_mc(setup: WalkSetup, n: int, root_seed: int, stream: str):
    """n stopped walks; returns the array of hit fractions."""
    seeds = np.array(
        [rng.derive_seed(root_seed, stream, i) for i in range(n)], dtype=np.uint64
    )
    status, hu, hv, pu, pv = _kernels.mc_hitting(
        setup.state, setup.q0, setup.r0,
        setup.tail[0], setup.tail[1], setup.head[0], setup.head[1],
        setup.b[0], setup.b[1], seeds, setup.budget,
        setup.mode, setup.flags, setup.fu0, setup.fv0,
        setup.ccx, setup.ccy, setup.crad, setup.dom.mesh, setup.max_path)
    if np.any(status == 2):
        raise StepBudgetExceeded("a kernel walk exceeded its budget")
    if np.any(status == 3):
        raise RuntimeError("a kernel walk left the domain or missed the target")
    mesh = setup.dom.mesh
    fractions = np.empty(n)
    if setup.mode == 2:
        tgt = setup.target
        for i in range(n):
            p = vertex_position(pu[i], pv[i], mesh)
            q = vertex_position(hu[i], hv[i], mesh)
            fractions[i] = tgt.hit_fraction(p, q)
    else:
        tgt = setup.target
        dom = setup.dom
        src = dom.source
        if src is not None and tgt.c_name:
            # project all hit vertices onto the continuum arc in one sweep
            pts = np.array([vertex_position(hu[i], hv[i], mesh) for i in range(n)])
            fractions = _project_many(src, tgt.c_name, tgt.d_name, pts)
        else:
            for i in range(n):
                fractions[i] = tgt.hit_fraction((int(hu[i]), int(hv[i])))
    return fractions


def _project_many(src, c_name, d_name, pts, samples=8192):
    tc, td = src.marks[c_name], src.marks[d_name]
    span = (td - tc) % 1.0
    ts = tc + span * np.linspace(0.0, 1.0, samples)
    arc = np.array([src.boundary_point(t % 1.0) for t in ts])
    idx = np.abs(pts[:, None] - arc[None, :]).argmin(axis=1)
    return idx / (samples - 1)


class CrossingSetup:
    """Cell-indexed encoding of a 4-arc crossing problem."""

    def __init__(self, dom: LatticeDomain, marks=("z1", "z2", "z3", "z4")):
        cells = sorted(dom.interior)
        index = {c: i for i, c in enumerate(cells)}
        n = len(cells)
        nbr = np.full((n, 6), -1, dtype=np.int32)
        for i, (q, r) in enumerate(cells):
            for d, (nq, nr) in enumerate(hex_neighbors(q, r)):
                j = index.get((nq, nr))
                if j is not None:
                    nbr[i, d] = j
        z1, z2, z3, z4 = (dom.marked[m] for m in marks)
        arc12 = split_boundary(dom, z1, z2).right
        arc34 = split_boundary(dom, z3, z4).right
        seed_cells = _adjacent_cells(dom, arc12, index)
        target = np.zeros(n, dtype=np.int8)
        for i in _adjacent_cells(dom, arc34, index):
            target[i] = 1
        self.nbr = nbr
        self.qs = np.array([q for q, _ in cells], dtype=np.int64)
        self.rs = np.array([r for _, r in cells], dtype=np.int64)
        self.seed_cells = seed_cells
        self.target_mask = target
        self.ncells = n

    @classmethod
    def rhombus(cls, n_side: int):
        """Left-to-right crossing of the axial rhombus (exactly self-dual)."""
        self = cls.__new__(cls)
        cells = [(q, r) for q in range(n_side) for r in range(n_side)]
        index = {c: i for i, c in enumerate(cells)}
        n = len(cells)
        nbr = np.full((n, 6), -1, dtype=np.int32)
        for i, (q, r) in enumerate(cells):
            for d, (nq, nr) in enumerate(hex_neighbors(q, r)):
                j = index.get((nq, nr))
                if j is not None:
                    nbr[i, d] = j
        self.nbr = nbr
        self.qs = np.array([q for q, _ in cells], dtype=np.int64)
        self.rs = np.array([r for _, r in cells], dtype=np.int64)
        self.seed_cells = np.array(
            [index[(0, r)] for r in range(n_side)], dtype=np.int32)
        target = np.zeros(n, dtype=np.int8)
        for r in range(n_side):
            target[index[(n_side - 1, r)]] = 1
        self.target_mask = target
        self.ncells = n
        return self


def _adjacent_cells(dom, arc_hexes, index):
    out = []
    seen = set()
    for h in arc_hexes:
        for nb in hex_neighbors(*h):
            i = index.get(nb)
            if i is not None and i not in seen:
                seen.add(i)
                out.append(i)
    return np.array(sorted(out), dtype=np.int32)


def run_crossing_mc(setup: CrossingSetup, n: int, root_seed: int, stream: str):
    seeds = np.array(
        [rng.derive_seed(root_seed, stream, i) for i in range(n)], dtype=np.uint64
    )
    return _kernels.mc_crossing(setup.nbr, setup.qs, setup.rs,
                                setup.seed_cells, setup.target_mask, seeds)


class AnnulusSetup:
    """Precomputed interface-edge structure of an annulus neighborhood."""

    def __init__(self, center, r_inner, r_outer, mesh=1.0, half_plane=False):
        if not 0 < r_inner < r_outer:
            raise ValueError("need 0 < r_inner < r_outer")
        center = complex(center)
        reach = r_outer + 3.1 * mesh
        sites = []
        site_index = {}
        r_lo = math.floor((center.imag - reach) / (1.5 * mesh)) - 1
        r_hi = math.ceil((center.imag + reach) / (1.5 * mesh)) + 1
        if half_plane:
            r_lo = max(0, r_lo)
        sq3m = math.sqrt(3.0) * mesh
        for r in range(r_lo, r_hi + 1):
            q_lo = math.floor((center.real - reach) / sq3m - 0.5 * r) - 1
            q_hi = math.ceil((center.real + reach) / sq3m - 0.5 * r) + 1
            for q in range(q_lo, q_hi + 1):
                c = complex(sq3m * (q + 0.5 * r), 1.5 * mesh * r)
                if abs(c - center) <= reach:
                    site_index[(q, r)] = len(sites)
                    sites.append((q, r))
        vert_index = {}
        vert_list = []
        e_s1, e_s2, e_va, e_vb = [], [], [], []
        for (q, r), i in site_index.items():
            for dq, dr in ((1, 0), (0, 1), (-1, 1)):
                j = site_index.get((q + dq, r + dr))
                if j is None:
                    continue
                shared = [c for c in hex_corner_units(q, r)
                          if c in set(hex_corner_units(q + dq, r + dr))]
                for v in shared:
                    if v not in vert_index:
                        vert_index[v] = len(vert_list)
                        vert_list.append(v)
                e_s1.append(i)
                e_s2.append(j)
                e_va.append(vert_index[shared[0]])
                e_vb.append(vert_index[shared[1]])
        nv = len(vert_list)
        vert_edges = np.full((nv, 3), -1, dtype=np.int32)
        fill_count = np.zeros(nv, dtype=np.int8)
        for e, (va, vb) in enumerate(zip(e_va, e_vb)):
            for v in (va, vb):
                vert_edges[v, fill_count[v]] = e
                fill_count[v] += 1
        zone = np.zeros(nv, dtype=np.int8)
        for v, (u, vv) in enumerate(vert_list):
            d = abs(vertex_position(u, vv, mesh) - center)
            if d <= r_inner:
                zone[v] = -1
            elif d >= r_outer:
                zone[v] = 1
        self.qs = np.array([q for q, _ in sites], dtype=np.int64)
        self.rs = np.array([r for _, r in sites], dtype=np.int64)
        self.e_s1 = np.array(e_s1, dtype=np.int32)
        self.e_s2 = np.array(e_s2, dtype=np.int32)
        self.e_va = np.array(e_va, dtype=np.int32)
        self.e_vb = np.array(e_vb, dtype=np.int32)
        self.vert_edges = vert_edges
        self.vert_zone = zone


def run_strands_mc(setup: AnnulusSetup, n: int, root_seed: int, stream: str):
    seeds = np.array(
        [rng.derive_seed(root_seed, stream, i) for i in range(n)], dtype=np.uint64
    )
    return _kernels.mc_strands(setup.qs, setup.rs, setup.e_s1, setup.e_s2,
                               setup.e_va, setup.e_vb, setup.vert_edges,
                               setup.vert_zone, seeds)
